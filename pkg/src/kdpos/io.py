"""Matrix JSON files and the matrix-spec mini-language used by the CLI.

Matrix JSON is ``{"dim": d, "re": [[...]], "im": [[...]]}`` (row-major). The
floats go through ``json``'s shortest round-trip repr, so a write/read cycle is
bit-exact.

Matrix specs::

    dft:5   haar:3:seed=42   ustar   spin:1:beta=1.9106   spin:1/2:beta=0.3
    hadamard:4   file:path/to/matrix.json
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bases import dft, haar_random, sylvester_hadamard_mub, u_star, wigner_small_d
from .core import as_transition
from .exceptions import ValidationError
from .linalg import DEFAULT_TOL

__all__ = ["matrix_to_json", "matrix_from_json", "read_matrix", "write_matrix", "parse_matrix_spec"]


class BadMatrixFile(ValidationError):
    pass


class BadMatrixSpec(ValidationError):
    pass


def matrix_to_json(m):
    a = np.asarray(m, dtype=complex)
    return {"dim": int(a.shape[0]), "re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_json(obj):
    try:
        d = int(obj["dim"])
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise BadMatrixFile(f"malformed matrix JSON: {exc}") from None
    if re.shape != (d, d) or im.shape != (d, d):
        raise BadMatrixFile(f"matrix JSON arrays must be {d}x{d}")
    return re + 1j * im


def read_matrix(path):
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise BadMatrixFile(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise BadMatrixFile(f"{path} is not valid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise BadMatrixFile(f"{path} does not hold a matrix object")
    return matrix_from_json(obj)


def write_matrix(path, m):
    Path(path).write_text(json.dumps(matrix_to_json(m)) + "\n")


def _int(text, what):
    try:
        return int(text)
    except ValueError:
        raise BadMatrixSpec(f"{what} must be an integer, got {text!r}") from None


def _options(parts):
    opts = {}
    for p in parts:
        key, sep, value = p.partition("=")
        if not sep:
            raise BadMatrixSpec(f"expected key=value, got {p!r}")
        opts[key] = value
    return opts


def parse_matrix_spec(spec, tol=DEFAULT_TOL):
    """Build a :class:`~kdpos.core.TransitionMatrix` from a spec string."""
    kind, _, rest = spec.partition(":")
    if kind == "file":
        if not rest:
            raise BadMatrixSpec("file: needs a path")
        return as_transition(read_matrix(rest), tol, name=spec)
    parts = rest.split(":") if rest else []
    if kind == "ustar" and not parts:
        t = u_star()
    elif kind == "dft" and len(parts) == 1:
        t = dft(_int(parts[0], "dimension"))
    elif kind == "haar" and len(parts) in (1, 2):
        seed = _int(_options(parts[1:]).get("seed", "0"), "seed")
        t = haar_random(_int(parts[0], "dimension"), seed)
    elif kind == "spin" and len(parts) == 2:
        try:
            s = Fraction(parts[0])
            beta = float(_options(parts[1:])["beta"])
        except (ValueError, ZeroDivisionError, KeyError):
            raise BadMatrixSpec(f"bad spin spec {spec!r}") from None
        t = wigner_small_d(s, beta)
    elif kind == "hadamard" and len(parts) == 1:
        d = _int(parts[0], "dimension")
        m = int(round(math.log2(d))) if d > 0 else 0
        if d < 4 or 2 ** m != d:
            raise BadMatrixSpec(f"hadamard dimension must be a power of 2 and >= 4, got {d}")
        t = sylvester_hadamard_mub(m)
    else:
        raise BadMatrixSpec(f"unrecognised matrix spec {spec!r}")
    return as_transition(t.u, tol, name=spec)
