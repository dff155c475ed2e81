"""Command-line front end: ``kdpos <subcommand> [options]``.

Exit codes: 0 success, 2 invalid input (bad matrix, state, spec or JSON),
3 numerical failure. ``KD_TOL_POS`` in the environment overrides the default
positivity slack; ``--tol-pos`` overrides both.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .bases import dft, equivalence_normalize, find_equivalence, u_star, wigner_small_d
from .core import check_density, classify, kd_distribution
from .exceptions import KDError, NumericalError
from .geometry import (beyond_pure_hull_certificate, enumerate_pure_kd_positive_d3, f_perp,
                       figure2_rows, hexagon_report, hull_membership, interior_membership,
                       section_scan, section_to_csv, y_plus_hexagon_check)
from .io import matrix_to_json, parse_matrix_spec, read_matrix
from .linalg import TolerancePolicy
from .real_space import conjecture_scan, dft_kernel_report, kd_real_dimension

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC = 0, 2, 3

BETA0 = float(np.arccos(-1.0 / 3.0))
D1_EXPECTED = np.array([[1, -2, 2], [2, -1, -2], [2, 2, 1]]) / 3.0


def fmt(x):
    """Floats with 12 significant digits; everything else via ``str``."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (float, np.floating)):
        return f"{float(x) + 0.0:.12g}"
    return str(x)


def num(x):
    return float(fmt(float(x)))


def _tolerance(args):
    eps_pos = TolerancePolicy().eps_pos
    env = os.environ.get("KD_TOL_POS")
    if env:
        try:
            eps_pos = float(env)
        except ValueError:
            raise ValueError(f"KD_TOL_POS must be a number, got {env!r}") from None
    if getattr(args, "tol_pos", None) is not None:
        eps_pos = args.tol_pos
    kw = {"eps_pos": eps_pos}
    if getattr(args, "tol_eq", None) is not None:
        kw["eps_eq"] = args.tol_eq
    if getattr(args, "tol_rank", None) is not None:
        kw["eps_rank"] = args.tol_rank
    return TolerancePolicy(**kw)


def _emit(args, text):
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _kv(pairs):
    return " ".join(f"{k}={fmt(v)}" for k, v in pairs)


def _matrix_lines(name, m):
    m = np.asarray(m)
    rows = []
    for r in m:
        cells = []
        for z in r:
            cells.append(fmt(z.real) if abs(z.imag) == 0 else f"{fmt(z.real)}{'+' if z.imag >= 0 else '-'}{fmt(abs(z.imag))}j")
        rows.append("  " + " ".join(cells))
    return [f"{name}:"] + rows


def _dims(text):
    out = []
    for part in text.split(","):
        lo, sep, hi = part.partition("..")
        try:
            out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
        except ValueError:
            raise ValueError(f"bad --dims item {part!r}") from None
    return out


# -- subcommands ---------------------------------------------------------------

def cmd_analyze(args):
    tol = _tolerance(args)
    t = parse_matrix_spec(args.matrix, tol)
    dim_v = kd_real_dimension(t, tol)
    t.require_zero_free()
    minimal = dim_v == 2 * t.dim - 1
    result = {"matrix": args.matrix, "d": t.dim, "m_ab": num(t.m_ab), "M_ab": num(t.big_m_ab),
              "dim_vkdr": dim_v, "minimal_polytope": minimal}
    lines = [_kv([("m_ab", t.m_ab), ("M_ab", t.big_m_ab), ("dim_vkdr", dim_v),
                  ("minimal_polytope", minimal)])]
    if args.state:
        rho = check_density(read_matrix(args.state), t.dim, tol)
        q = kd_distribution(t, rho)
        rep = classify(t, rho, tol)
        dec = hull_membership(t, rho, tol) if rep.is_kd_positive else None
        interior = interior_membership(t, rho, tol) if dec is not None else False
        result.update(kd=matrix_to_json(q), kd_real=rep.is_kd_real, kd_positive=rep.is_kd_positive,
                      min_real_part=num(rep.min_real_part), max_abs_imag=num(rep.max_abs_imag),
                      n_a=rep.support_a, n_b=rep.support_b, in_hull=dec is not None,
                      hull_interior=interior)
        if dec is not None:
            result.update(lambdas=[num(x) for x in dec.lambdas], mus=[num(x) for x in dec.mus])
        lines += _matrix_lines("kd", q)
        lines.append(_kv([("kd_real", rep.is_kd_real), ("kd_positive", rep.is_kd_positive),
                          ("min_real_part", rep.min_real_part), ("max_abs_imag", rep.max_abs_imag),
                          ("n_a", rep.support_a), ("n_b", rep.support_b)]))
        lines.append(_kv([("in_hull", dec is not None), ("hull_interior", interior)]))
        if dec is not None:
            lines.append("lambdas=" + ",".join(fmt(x) for x in dec.lambdas)
                         + " mus=" + ",".join(fmt(x) for x in dec.mus))
    _emit(args, json.dumps(result) if args.format == "json" else "\n".join(lines))
    return EXIT_OK


def cmd_scan(args):
    tol = _tolerance(args)
    report = conjecture_scan(_dims(args.dims), args.samples, args.seed, tol, workers=args.workers)
    if args.format == "pretty":
        lines = []
        for d, frac in sorted(report.minimal_fraction().items()):
            hist = report.histogram()[d]
            lines.append(_kv([("d", d), ("samples", sum(hist.values())),
                              ("minimal_fraction", float(frac))])
                         + " dims=" + ",".join(f"{k}:{v}" for k, v in sorted(hist.items())))
        _emit(args, "\n".join(lines))
    elif args.format == "json":
        _emit(args, json.dumps([r.__dict__ for r in report.rows]))
    else:
        _emit(args, report.to_csv())
    return EXIT_OK


def spin1_checks(tol=None):
    """The three spin-1 checks; returns a dict of results."""
    tol = tol or TolerancePolicy()
    frame = wigner_small_d(1, BETA0)
    match = float(np.max(np.abs(frame.u - D1_EXPECTED)))
    target = equivalence_normalize(u_star()).u
    canon = float(np.max(np.abs(equivalence_normalize(frame).u - target)))
    perm = find_equivalence(frame, u_star())
    witness = np.diag([1.0, -1.0, -1.0]) @ u_star().u @ np.diag([-1.0, -1.0, 1.0])
    witness_err = float(np.max(np.abs(frame.u - witness)))
    states = enumerate_pure_kd_positive_d3(frame, tol)
    # I/3 + 0.15 F_perp of U*, carried into the spin frame by the sign witness
    d1 = np.diag([1.0, -1.0, -1.0])
    rho = d1 @ (np.eye(3) / 3 + 0.15 * f_perp(u_star(), tol).f_perp) @ d1
    cert = beyond_pure_hull_certificate(frame, rho, tol)
    return {
        "d1_matrix_match": match <= 1e-10,
        "d1_max_error": match,
        "equivalence_to_ustar": perm is not None,
        "canonical_form_distance": canon,
        "sign_witness": witness_err <= 1e-12,
        "sign_witness_error": witness_err,
        "pure_states": len(states),
        "certificate": cert,
    }


def cmd_spin1_demo(args):
    res = spin1_checks(_tolerance(args))
    cert = res["certificate"]
    ok = lambda b: "pass" if b else "fail"
    lines = [
        f"d1_matrix_match={ok(res['d1_matrix_match'])} "
        f"equivalence_to_ustar={ok(res['equivalence_to_ustar'])} pure_states={res['pure_states']}",
        f"sign_witness={ok(res['sign_witness'])} D1=diag(1,-1,-1) D2=diag(-1,-1,1) "
        f"max_error={fmt(res['sign_witness_error'])}",
        (f"certificate=pass x=0.15 s={fmt(cert.s)} h={fmt(cert.h)}" if cert is not None
         else "certificate=fail x=0.15"),
    ]
    if args.format == "json":
        out = {k: (num(v) if isinstance(v, float) else v) for k, v in res.items() if k != "certificate"}
        out["certificate"] = None if cert is None else {"s": num(cert.s), "h": num(cert.h),
                                                        "f_perp": matrix_to_json(cert.f_perp)}
        _emit(args, json.dumps(out))
    else:
        _emit(args, "\n".join(lines))
    passed = (res["d1_matrix_match"] and res["equivalence_to_ustar"] and res["sign_witness"]
              and res["pure_states"] == 9 and cert is not None)
    return EXIT_OK if passed else EXIT_NUMERIC


def cmd_figure_data(args):
    tol = _tolerance(args)
    if args.which == "fig1":
        _emit(args, section_to_csv(section_scan(u_star(), steps=args.steps, tol=tol)))
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["curve", "lambda1", "lambda2"])
        for curve, a, b in figure2_rows(args.steps):
            w.writerow([curve, fmt(float(a)), fmt(float(b))])
        _emit(args, buf.getvalue())
    return EXIT_OK


def cmd_enumerate_pure(args):
    tol = _tolerance(args)
    t = parse_matrix_spec(args.matrix, tol)
    states = enumerate_pure_kd_positive_d3(t, tol)
    if args.format == "pretty":
        lines = [f"pure_states={len(states)}"]
        for s in states:
            amp = ",".join(fmt(z.real) if z.imag == 0 else f"{fmt(z.real)}{z.imag:+.12g}j" for z in s.psi)
            lines.append(_kv([("n_a", s.n_a), ("n_b", s.n_b), ("is_basis", s.is_basis)]) + f" psi=[{amp}]")
        _emit(args, "\n".join(lines))
    else:
        _emit(args, json.dumps([{"state": matrix_to_json(s.projector), "n_a": s.n_a, "n_b": s.n_b,
                                 "is_basis": s.is_basis} for s in states]))
    return EXIT_OK


def cmd_certify(args):
    tol = _tolerance(args)
    t = parse_matrix_spec(args.matrix, tol)
    if args.state:
        rho = read_matrix(args.state)
    else:
        rho = np.eye(t.dim) / t.dim + args.x * f_perp(t, tol).f_perp
    cert = beyond_pure_hull_certificate(t, rho, tol)
    if args.format == "pretty":
        _emit(args, "certificate=none" if cert is None else
              f"certificate=found s={fmt(cert.s)} h={fmt(cert.h)}")
    else:
        _emit(args, json.dumps(None if cert is None else
                               {"s": num(cert.s), "h": num(cert.h), "f_perp": matrix_to_json(cert.f_perp)}))
    return EXIT_OK


def cmd_dft_structure(args):
    tol = _tolerance(args)
    rep = dft_kernel_report(dft(args.p), tol)
    pairs = [("p", rep.p), ("kernel_dim", rep.kernel_dim), ("relation_dim", rep.relation_dim),
             ("projector_residual", rep.projector_residual),
             ("max_relation_violation", rep.max_relation_violation), ("passed", rep.passed)]
    if args.format == "json":
        _emit(args, json.dumps({k: (num(v) if isinstance(v, float) else v) for k, v in pairs}))
    else:
        _emit(args, _kv(pairs))
    return EXIT_OK if rep.passed else EXIT_NUMERIC


def cmd_hexagon_check(args):
    tol = _tolerance(args)
    passed = y_plus_hexagon_check(None, tol)
    lines = []
    for scale in (1.0, 1.01):
        for p in hexagon_report(None, scale, tol):
            lines.append(_kv([("scale", scale), ("lambda1", p.lambda1), ("lambda2", p.lambda2),
                              ("kd_positive", p.kd_positive), ("min_eig", p.min_eigenvalue),
                              ("tr_f_perp", p.trace_f_perp)]))
    lines.append(f"hexagon={'pass' if passed else 'fail'}")
    _emit(args, json.dumps({"passed": passed}) if args.format == "json" else "\n".join(lines))
    return EXIT_OK if passed else EXIT_NUMERIC


# -- parser --------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "pretty"), default=None)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--tol-pos", type=float, default=None)
    common.add_argument("--tol-eq", type=float, default=None)
    common.add_argument("--tol-rank", type=float, default=None)

    p = argparse.ArgumentParser(prog="kdpos", description="Kirkwood-Dirac positivity toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="overlaps, dim V_KDr, optional state report")
    a.add_argument("--matrix", required=True)
    a.add_argument("--state", help="density matrix JSON file")
    a.set_defaults(func=cmd_analyze, default_format="pretty")

    s = sub.add_parser("scan", parents=[common], help="Haar scan of dim V_KDr")
    s.add_argument("--dims", default="2..10", help="e.g. 3, 2..10 or 3,5,7")
    s.add_argument("--samples", type=int, default=100)
    s.set_defaults(func=cmd_scan, default_format="csv")

    d = sub.add_parser("spin1-demo", parents=[common], help="spin-1 frame at arccos(-1/3)")
    d.set_defaults(func=cmd_spin1_demo, default_format="pretty")

    f = sub.add_parser("figure-data", parents=[common], help="CSV data for the section figures")
    f.add_argument("which", choices=("fig1", "fig2"))
    f.add_argument("--steps", type=int, default=101)
    f.set_defaults(func=cmd_figure_data, default_format="csv")

    e = sub.add_parser("enumerate-pure", parents=[common], help="pure KD-positive states (d = 3)")
    e.add_argument("--matrix", default="ustar")
    e.set_defaults(func=cmd_enumerate_pure, default_format="json")

    c = sub.add_parser("certify", parents=[common], help="certificate outside the pure-state hull")
    c.add_argument("--matrix", default="ustar")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--state", help="density matrix JSON file")
    g.add_argument("--x", type=float, help="use I/3 + x F_perp")
    c.set_defaults(func=cmd_certify, default_format="json")

    k = sub.add_parser("dft-structure", parents=[common], help="kernel structure for a prime DFT")
    k.add_argument("--p", type=int, required=True)
    k.set_defaults(func=cmd_dft_structure, default_format="pretty")

    h = sub.add_parser("hexagon-check", parents=[common], help="extreme points of the top face for U*")
    h.set_defaults(func=cmd_hexagon_check, default_format="pretty")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (KDError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
