"""Acceptance criteria, one test per criterion.

Each ``criterion_*`` function returns ``(passed, detail)``. Under pytest the
results are also collected into an end-of-run summary; run this file as a
script (``python3 tests/test_acceptance.py``) to get just the pass/fail lines.
"""

import time

import numpy as np
import pytest

from kdpos.bases import dft, haar_random, sylvester_hadamard_mub, u_star, wigner_small_d
from kdpos.cli import spin1_checks
from kdpos.core import as_transition, classify, kd_distribution, marginals, overlap_trace, reconstruct
from kdpos.geometry import (beyond_pure_hull_certificate, enumerate_pure_kd_positive_d3, f_perp,
                            mub_support_law_check, section_scan, two_support_candidates,
                            x_interval, x_max_search, y_plus_hexagon_check)
from kdpos.real_space import (conjecture_scan, dft_kernel_report, kd_real_dimension,
                              real_symmetric_residual)

S6 = np.sqrt(6.0)


def _density(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def criterion_1():
    t0 = time.perf_counter()
    dims = {p: kd_real_dimension(dft(p)) for p in (2, 3, 5, 7, 11, 13)}
    elapsed = time.perf_counter() - t0
    ok = all(v == 2 * p - 1 for p, v in dims.items()) and elapsed < 1.0
    return ok, f"dims={dims} time={elapsed:.2f}s"


def criterion_2():
    t0 = time.perf_counter()
    dims = []
    for s in range(200):
        t = haar_random(2, s)
        if t.zero_free:
            dims.append(kd_real_dimension(t))
    elapsed = time.perf_counter() - t0
    ok = len(dims) > 0 and all(v == 3 for v in dims) and elapsed < 1.0
    return ok, f"zero_free={len(dims)}/200 all3={all(v == 3 for v in dims)} time={elapsed:.2f}s"


def criterion_3():
    t0 = time.perf_counter()
    report = conjecture_scan(range(3, 11), 100, seed=7)
    elapsed = time.perf_counter() - t0
    frac = report.minimal_fraction()
    ok = all(f == 1.0 for f in frac.values()) and len(report.rows) == 800 and elapsed < 120
    return ok, f"minimal_fraction={min(frac.values()):.3f} rows={len(report.rows)} time={elapsed:.1f}s"


def criterion_4():
    t0 = time.perf_counter()
    frames = [u_star(), sylvester_hadamard_mub(2)]
    frames += [wigner_small_d(1, b) for b in np.linspace(0.2, 2.9, 10)]
    worst, ok = 0.0, True
    for t in frames:
        kdim, res = real_symmetric_residual(t)
        worst = max(worst, res)
        ok &= kdim == t.dim * (t.dim + 1) // 2 and res <= 1e-8
        ok &= kd_real_dimension(t) == t.dim * (t.dim + 1) // 2
    elapsed = time.perf_counter() - t0
    return ok and elapsed < 5.0, f"frames={len(frames)} max_residual={worst:.1e} time={elapsed:.2f}s"


def criterion_5():
    reps = [dft_kernel_report(dft(p)) for p in (3, 5, 7)]
    worst = max(r.projector_residual for r in reps)
    return all(r.passed for r in reps), f"kernel_dims={[r.kernel_dim for r in reps]} residual={worst:.1e}"


def criterion_6():
    t = u_star()
    states = enumerate_pure_kd_positive_d3(t)
    nonbasis = [s for s in states if not s.is_basis]
    ok = len(states) == 9 and len(nonbasis) == 3
    worst_psi = worst_q = 0.0
    for i, k in ((0, 1), (0, 2), (1, 2)):
        target = np.zeros(3, dtype=complex)
        target[i], target[k] = 1 / np.sqrt(2), -1 / np.sqrt(2)
        qt = np.zeros((3, 3))
        qt[i, i] = qt[k, k] = 1 / 6
        qt[i, k] = qt[k, i] = 2 / 6
        # distance up to a global phase
        dist = [1 - abs(np.vdot(target, s.psi)) for s in nonbasis]
        if not dist:
            return False, "no non-basis states"
        match = nonbasis[int(np.argmin(dist))]
        phase = np.vdot(match.psi, target)
        phase /= abs(phase)
        worst_psi = max(worst_psi, np.max(np.abs(match.psi * phase - target)))
        worst_q = max(worst_q, np.max(np.abs(match.kd - qt)))
    ok &= worst_psi <= 1e-9 and worst_q <= 1e-12
    return ok, f"states={len(states)} nonbasis={len(nonbasis)} psi_err={worst_psi:.1e} q_err={worst_q:.1e}"


def criterion_7():
    t = u_star()
    fp = f_perp(t).f_perp
    expected = np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]]) / S6
    err_f = min(np.max(np.abs(fp - expected)), np.max(np.abs(fp + expected)))
    iv = x_interval(t, np.eye(3) / 3)
    err_lo, err_hi = abs(iv.lo + 1 / S6), abs(iv.hi - 1 / (2 * S6))
    ok = err_f <= 1e-12 and max(err_lo, err_hi) <= 1e-8 and not iv.empty
    return ok, f"f_err={err_f:.1e} interval=[{iv.lo:.10f}, {iv.hi:.10f}] endpoint_err={max(err_lo, err_hi):.1e}"


def criterion_8():
    t = u_star()
    fp = f_perp(t).f_perp
    xs_pos = np.linspace(1 / (2 * S6) / 20, 1 / (2 * S6), 20)
    xs_neg = np.linspace(-1 / S6, 0.0, 20)
    found = sum(beyond_pure_hull_certificate(t, np.eye(3) / 3 + x * fp) is not None for x in xs_pos)
    none = sum(beyond_pure_hull_certificate(t, np.eye(3) / 3 + x * fp) is None for x in xs_neg)
    return found == 20 and none == 20, f"certified={found}/20 (x>0) none={none}/20 (x<=0)"


def criterion_9():
    x, sigma = x_max_search(u_star(), grid=10, seed=0)
    err = abs(x - 1 / (2 * S6))
    dist = float(np.max(np.abs(sigma - np.eye(3) / 3)))
    return err <= 1e-6 and dist <= 1e-4, f"x_max={x:.12f} err={err:.1e} |sigma-I/3|={dist:.1e}"


def criterion_10():
    ok = y_plus_hexagon_check()
    return ok, "six vertices on the face, six 1.01-scaled probes excluded" if ok else "hexagon check failed"


def criterion_11():
    res = spin1_checks()
    ok = (res["d1_matrix_match"] and res["equivalence_to_ustar"] and res["sign_witness"]
          and res["pure_states"] == 9 and res["certificate"] is not None)
    return ok, (f"d1_err={res['d1_max_error']:.1e} equivalent={res['equivalence_to_ustar']} "
                f"witness_err={res['sign_witness_error']:.1e} certificate={res['certificate'] is not None}")


def criterion_12():
    r5 = mub_support_law_check(dft(5), samples=10_000, seed=0)
    r4 = mub_support_law_check(dft(4), samples=0, seed=0)
    n_cand = 2 * 4 + len(two_support_candidates(dft(4)))
    law4 = [s.n_a * s.n_b for s in r4.nonbasis_positive]
    ok = r5.passed and not r5.nonbasis_positive and r4.law_violations == 0 and law4 and all(v == 4 for v in law4)
    return bool(ok), (f"dft5 nonbasis={len(r5.nonbasis_positive)} of {r5.n_positive} positive; "
                      f"dft4 candidates={n_cand} nonbasis={len(law4)} law_violations={r4.law_violations}")


def criterion_13():
    rng = np.random.default_rng(13)
    rec = marg = ov = 0.0
    for n in range(100):
        d = int(rng.integers(2, 7))
        t = haar_random(d, int(rng.integers(2 ** 32)))
        rho, sig = _density(d, rng), _density(d, rng)
        q = kd_distribution(t, rho)
        rec = max(rec, np.max(np.abs(reconstruct(t, q) - rho)))
        rows, cols, tot = marginals(q)
        b_diag = np.diag(t.u.conj().T @ rho @ t.u)
        marg = max(marg, np.max(np.abs(rows - np.diag(rho))), np.max(np.abs(cols - b_diag)),
                   abs(tot - np.trace(rho)))
        exact = np.trace(rho @ sig).real
        ov = max(ov, abs(overlap_trace(t, rho, sig) - exact) / abs(exact))
    inv = 0
    for n in range(50):
        d = int(rng.integers(2, 6))
        t = haar_random(d, int(rng.integers(2 ** 32)))
        rho = _density(d, rng)
        if n % 3 == 0:
            # a KD-positive state, so that positivity itself is exercised
            rho = 0.5 * np.diag(rng.dirichlet(np.ones(d))) + 0.5 * t.u[:, [0]] @ t.u[:, [0]].conj().T
        r, c = rng.permutation(d), rng.permutation(d)
        alpha, beta = rng.uniform(0, 2 * np.pi, d), rng.uniform(0, 2 * np.pi, d)
        u2 = np.exp(-1j * alpha)[:, None] * t.u[np.ix_(r, c)] * np.exp(1j * beta)[None, :]
        rho2 = np.exp(-1j * alpha)[:, None] * rho[np.ix_(r, r)] * np.exp(1j * alpha)[None, :]
        t2 = as_transition(u2)
        same_q = np.max(np.abs(kd_distribution(t2, rho2) - kd_distribution(t, rho)[np.ix_(r, c)])) <= 1e-12
        a, b = classify(t, rho), classify(t2, rho2)
        same = (a.is_kd_real, a.is_kd_positive, a.support_a, a.support_b) == (
            b.is_kd_real, b.is_kd_positive, b.support_a, b.support_b)
        inv += bool(same_q and same)
    ok = rec <= 1e-9 and marg <= 1e-10 and ov <= 1e-8 and inv == 50
    return ok, f"reconstruct={rec:.1e} marginals={marg:.1e} overlap_rel={ov:.1e} invariant={inv}/50"


def criterion_14():
    rows = section_scan(u_star(), steps=101)
    hi = np.array([r.x_hi for r in rows])
    bump = hi[1:-1] - 0.5 * (hi[:-2] + hi[2:])
    above = np.flatnonzero(bump >= 1e-6) + 1
    ks = ", ".join(f"{rows[i].k:.2f}" for i in above)
    return len(above) >= 3, f"interior points above the chord: {len(above)} (k = {ks})"


CRITERIA = {
    1: ("DFT-prime minimality", criterion_1),
    2: ("qubit case", criterion_2),
    3: ("conjecture scan", criterion_3),
    4: ("real-U structure", criterion_4),
    5: ("DFT kernel structure", criterion_5),
    6: ("U* pure-state census", criterion_6),
    7: ("F_perp and intervals", criterion_7),
    8: ("beyond-hull certificates", criterion_8),
    9: ("x_max", criterion_9),
    10: ("Y+ hexagon", criterion_10),
    11: ("spin-1 equivalence", criterion_11),
    12: ("MUB support law", criterion_12),
    13: ("property suite", criterion_13),
    14: ("non-polytope probe", criterion_14),
}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, record):
    name, fn = CRITERIA[number]
    passed, detail = fn()
    record(f"{number} {name}", passed, detail)
    assert passed, detail


if __name__ == "__main__":
    for number, (name, fn) in sorted(CRITERIA.items()):
        passed, detail = fn()
        print(f"{'PASS' if passed else 'FAIL'}  {number:>2} {name}: {detail}")
