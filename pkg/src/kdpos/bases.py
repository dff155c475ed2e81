"""Transition matrices of interest and predicates on them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import TransitionMatrix, as_transition
from .exceptions import WrongDimension
from .linalg import DEFAULT_TOL, gram_schmidt, hermitian_eigen

__all__ = [
    "SpinFrame",
    "dft",
    "haar_random",
    "u_star",
    "wigner_small_d",
    "spin_jy",
    "sylvester_hadamard_mub",
    "equivalence_normalize",
    "find_equivalence",
    "phase_table",
    "check_phase_genericity",
    "check_d3_genericity",
    "perturb_columns",
]

TWO_PI = 2.0 * np.pi


def _wrap(x, period):
    """Distance from ``x`` to the nearest multiple of ``period``."""
    r = np.mod(x, period)
    return np.minimum(r, period - r)


def dft(d):
    """Discrete Fourier transform ``U[k, l] = w^(k l) / sqrt(d)``, ``w = exp(-2 pi i / d)``."""
    if d < 2:
        raise ValueError("dft needs d >= 2")
    k = np.arange(d)
    # reduce the exponent first so every entry is computed from a small angle
    expo = np.outer(k, k) % d
    u = np.exp(-2j * np.pi * expo / d) / np.sqrt(d)
    return TransitionMatrix(u, name=f"dft:{d}")


def haar_random(d, seed):
    """Haar-distributed unitary from the QR decomposition of a Ginibre matrix.

    The phases of ``diag(R)`` are moved into ``Q`` so that the decomposition is
    unique, which is what makes the result Haar distributed.
    """
    if d < 2:
        raise ValueError("haar_random needs d >= 2")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))
    return TransitionMatrix(q, name=f"haar:{d}:seed={seed}")


def u_star():
    """The real orthogonal 3x3 matrix with the largest ``m_AB / M_AB`` (= 1/2)."""
    u = np.array([[-1, 2, 2], [2, -1, 2], [2, 2, -1]], dtype=complex) / 3.0
    return TransitionMatrix(u, name="ustar")


@dataclass(frozen=True)
class SpinFrame:
    """Spin ``s`` (integer or half-integer) and Euler angle ``beta`` in radians."""

    s: Fraction
    beta: float

    def __post_init__(self):
        s = Fraction(self.s)
        object.__setattr__(self, "s", s)
        if s <= 0 or (2 * s).denominator != 1:
            raise ValueError(f"spin must be a positive multiple of 1/2, got {self.s}")
        if not 0.0 <= self.beta <= np.pi:
            raise ValueError(f"beta must lie in [0, pi], got {self.beta}")

    @property
    def dim(self):
        return int(2 * self.s + 1)


def spin_jy(s):
    """``J_y`` in the ``J_z`` eigenbasis ordered ``m = s, s-1, ..., -s``."""
    s = Fraction(s)
    d = int(2 * s + 1)
    m = np.array([float(s) - k for k in range(d)])
    # J+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>; |m+1> sits one index above |m>
    jplus = np.zeros((d, d))
    for k in range(1, d):
        jplus[k - 1, k] = np.sqrt(float(s) * (float(s) + 1) - m[k] * (m[k] + 1))
    return (jplus - jplus.T) / 2j


def wigner_small_d(frame, beta=None):
    """Wigner small d-matrix ``exp(-i beta J_y)`` as a transition matrix.

    ``wigner_small_d(SpinFrame(1, b))`` and ``wigner_small_d(1, b)`` are
    equivalent. Rows and columns are ordered ``m = s, ..., -s``. The
    exponential is evaluated through the eigendecomposition of ``J_y``.
    """
    if not isinstance(frame, SpinFrame):
        frame = SpinFrame(Fraction(frame), float(beta))
    w, v = hermitian_eigen(spin_jy(frame.s))
    d = (v * np.exp(-1j * frame.beta * w)) @ v.conj().T
    if np.max(np.abs(d.imag)) > 1e-10:
        raise ArithmeticError("small d-matrix came out complex")
    u = d.real.astype(complex)
    return TransitionMatrix(u, name=f"spin:{frame.s}:beta={frame.beta!r}")


def sylvester_hadamard_mub(m):
    """Normalised Sylvester-Hadamard matrix of order ``d = 2**m`` (real MUB)."""
    if m < 2:
        raise ValueError("sylvester_hadamard_mub needs m >= 2 (d >= 4)")
    h2 = np.array([[1.0, 1.0], [1.0, -1.0]])
    h = h2
    for _ in range(m - 1):
        h = np.kron(h2, h)
    d = h.shape[0]
    return TransitionMatrix((h / np.sqrt(d)).astype(complex), name=f"hadamard:{d}")


def equivalence_normalize(u, tol=DEFAULT_TOL):
    """Canonical representative with a real positive first row and column.

    Multiplies columns then rows by phases (``U -> D(-phi) U D(psi)``).
    Idempotent; entry moduli are untouched.
    """
    t = as_transition(u, tol).require_zero_free()
    a = t.u.copy()
    a = a * (np.abs(a[0]) / a[0])[None, :]
    a = a * (np.abs(a[:, 0]) / a[:, 0])[:, None]
    a[0, :] = np.abs(a[0, :])
    a[:, 0] = np.abs(a[:, 0])
    return TransitionMatrix(a, eps_pos=t.eps_pos, name=t.name)


def find_equivalence(u, v, tol=1e-9):
    """Search row/column permutations making ``u`` and ``v`` equivalent.

    Returns ``(row_perm, col_perm)`` such that the canonical form of
    ``u[row_perm][:, col_perm]`` matches that of ``v`` within ``tol``, or
    ``None``. Exhaustive over ``(d!)**2`` pairs, so keep ``d <= 5``.
    """
    tu, tv = as_transition(u), as_transition(v)
    if tu.dim != tv.dim:
        return None
    target = equivalence_normalize(tv).u
    d = tu.dim
    moduli_u = np.sort(np.abs(tu.u).ravel())
    moduli_v = np.sort(np.abs(tv.u).ravel())
    if np.max(np.abs(moduli_u - moduli_v)) > tol:
        return None
    for rows in itertools.permutations(range(d)):
        sub = tu.u[list(rows)]
        for cols in itertools.permutations(range(d)):
            cand = equivalence_normalize(sub[:, list(cols)]).u
            if np.max(np.abs(cand - target)) <= tol:
                return list(rows), list(cols)
    return None


def phase_table(u):
    t = as_transition(u).require_zero_free()
    return np.angle(t.u)


def check_phase_genericity(u, tol=DEFAULT_TOL):
    """Phase condition guaranteeing that only basis states are pure KD-positive.

    True iff ``phi[k, j] - phi[k', j] != phi[k, j'] - phi[k', j']`` (mod 2 pi),
    with margin ``tol.eps_eq``, for all ``k != k'`` and ``j != j'``.
    """
    phi = phase_table(u)
    d = phi.shape[0]
    for k, kp in itertools.combinations(range(d), 2):
        row_diff = phi[k] - phi[kp]
        for j, jp in itertools.combinations(range(d), 2):
            if _wrap(row_diff[j] - row_diff[jp], TWO_PI) <= tol.eps_eq:
                return False
    return True


def check_d3_genericity(u, tol=DEFAULT_TOL):
    """Six phase conditions on a 3x3 ``U`` that force ``rank Im Q = 4``."""
    t = as_transition(u)
    if t.dim != 3:
        raise WrongDimension(f"check_d3_genericity needs d = 3, got {t.dim}")
    phi = phase_table(t)
    x21 = phi[1, 0] - phi[0, 0]
    x22 = phi[1, 1] - phi[0, 1]
    x31 = phi[2, 0] - phi[0, 0]
    x32 = phi[2, 1] - phi[0, 1]
    quarter = [x21, x22, x31, x32]
    half = [x21 - x22, x31 - x32]
    return (all(_wrap(x, np.pi / 2) > tol.eps_eq for x in quarter)
            and all(_wrap(x, np.pi) > tol.eps_eq for x in half))


def perturb_columns(u, theta, tol=DEFAULT_TOL):
    """Phase-perturb the first two columns and re-orthonormalise.

    The first entry of column 1 is multiplied by ``exp(i theta)`` and the
    first entry of column 2 by ``exp(-i theta)``; Gram-Schmidt is then run
    over all columns in order. Column 1 is kept exactly; the others move by
    ``O(theta)`` so the result tends to ``u`` as ``theta -> 0``.
    """
    t = as_transition(u, tol).require_zero_free()
    if t.dim < 2:
        raise WrongDimension("perturb_columns needs d >= 2")
    cols = t.u.copy()
    cols[0, 0] *= np.exp(1j * theta)
    cols[0, 1] *= np.exp(-1j * theta)
    q = gram_schmidt(cols, tol)
    return TransitionMatrix(q, eps_pos=t.eps_pos, name=f"{t.name}+theta={theta!r}")
