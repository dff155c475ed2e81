"""Convex geometry of the KD-positive states.

Hull membership for ``conv(A u B)``, the one-dimensional complement ``F_perp``
of ``span(A u B)`` inside the KD-real operators for real 3x3 frames, the
intervals ``{x : sigma + x F_perp is a KD-positive state}``, pure-state
enumeration, and separating-hyperplane certificates for mixed states outside
the hull of the pure KD-positive states.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field

import numpy as np

from .bases import u_star
from .core import (as_transition, check_density, check_operator, classify, kd_distribution,
                   projector)
from .exceptions import (DegenerateSolution, NotInHull, NotInSpan, NotKDPositive, NotMUB,
                         NotReal, ValidationError, WrongDimension, WrongMatrix)
from .linalg import DEFAULT_TOL, hermitian_eigen, null_space, numerical_rank
from .real_space import _is_prime, operator_coords, span_ab_coords, basis_norms

__all__ = [
    "HullDecomposition",
    "hull_membership",
    "interior_membership",
    "PerpOperator",
    "f_perp",
    "Interval",
    "x_interval",
    "x_max_search",
    "PureKDState",
    "two_support_candidates",
    "enumerate_pure_kd_positive_d3",
    "Certificate",
    "beyond_pure_hull_certificate",
    "SectionRow",
    "section_scan",
    "section_to_csv",
    "HexagonPoint",
    "hexagon_report",
    "y_plus_hexagon_check",
    "HEXAGON_VERTICES",
    "figure2_rows",
    "MUBSupportReport",
    "mub_support_law_check",
]


def _basis_projectors(t):
    eye = np.eye(t.dim, dtype=complex)
    pa = [np.outer(e, e) for e in eye]
    pb = [np.outer(t.u[:, j], t.u[:, j].conj()) for j in range(t.dim)]
    return pa, pb


def _require_real_d3(t):
    if t.dim != 3:
        raise WrongDimension(f"this construction needs d = 3, got {t.dim}")
    if not t.is_real:
        raise NotReal("this construction needs a real transition matrix")
    t.require_zero_free()


# -- conv(A u B) -------------------------------------------------------------

@dataclass(frozen=True)
class HullDecomposition:
    """Weights of ``rho = sum_i lambdas[i] |a_i><a_i| + sum_j mus[j] |b_j><b_j|``."""

    lambdas: np.ndarray
    mus: np.ndarray

    def state(self, u):
        t = as_transition(u)
        pa, pb = _basis_projectors(t)
        return sum(l * p for l, p in zip(self.lambdas, pa)) + sum(m * p for m, p in zip(self.mus, pb))


def _quadruple_residual(r):
    """``max |r_ij + r_11 - r_i1 - r_1j|`` (anchor cell ``(1, 1)``)."""
    return float(np.max(np.abs(r + r[0, 0] - r[:, :1] - r[:1, :])))


def hull_membership(u, rho, tol=DEFAULT_TOL):
    """Decide ``rho in conv(A u B)`` and, if so, return a decomposition.

    ``rho`` belongs to the hull iff it is KD-positive and the rescaled KD
    matrix ``R = Q / |U|^2`` is additively separable,
    ``R_ij + R_11 = R_i1 + R_1j``. The weights are then read off ``R``: with
    ``c`` the column holding the smallest entry of row 1,
    ``lambda_i = R_ic`` and ``mu_j = R_1j - R_1c``.

    For mutually unbiased frames the same test is run directly on ``Q`` and
    the two verdicts must agree.
    """
    t = as_transition(u, tol).require_zero_free()
    rho = check_density(rho, t.dim, tol)
    report = classify(t, rho, tol)
    if not report.is_kd_positive:
        return None
    q = kd_distribution(t, rho).real
    # all |U|^2 equal 1/d for MUB, so no entrywise division is needed
    r = q * t.dim if t.is_mub else q / np.abs(t.u) ** 2
    if _quadruple_residual(r) > tol.eps_eq:
        return None
    c = int(np.argmin(r[0]))
    lambdas = np.clip(r[:, c], 0.0, None)
    mus = np.clip(r[0] - r[0, c], 0.0, None)
    return HullDecomposition(lambdas=lambdas, mus=mus)


def interior_membership(u, rho, tol=DEFAULT_TOL):
    """True iff ``rho`` lies in the interior of ``conv(A u B)``.

    Decompositions form the family ``(lambda - s, mu + s)`` because
    ``sum_i |a_i><a_i| = sum_j |b_j><b_j|``; some member is strictly positive
    iff ``min(lambda) + min(mu) > 2 eps_pos``.
    """
    dec = hull_membership(u, rho, tol)
    if dec is None:
        raise NotInHull("state is not in conv(A u B)")
    return bool(dec.lambdas.min() + dec.mus.min() > 2 * tol.eps_pos)


# -- F_perp and the x-intervals (real frames, d = 3) -------------------------

@dataclass(frozen=True)
class PerpOperator:
    f_perp: np.ndarray
    f_vector: np.ndarray


def f_perp(u, tol=DEFAULT_TOL):
    """Unit operator spanning ``V_KDr`` modulo ``span(A u B)`` for a real 3x3 frame.

    ``F = (1/sqrt 2) [[0, f1, f2], [f1, 0, f3], [f2, f3, 0]]`` with ``|f| = 1``
    solving ``<b_j|F|b_j> = 0`` for all ``j``; the sign makes the first
    non-zero component of ``f`` positive.
    """
    t = as_transition(u, tol)
    _require_real_d3(t)
    v = t.u.real
    m = np.array([[v[0, j] * v[1, j], v[0, j] * v[2, j], v[1, j] * v[2, j]] for j in range(3)])
    rank = numerical_rank(m, tol)
    if rank != 2:
        raise DegenerateSolution(f"F_perp conditions have a {3 - rank}-dimensional solution space")
    f = null_space(m, tol, rank=2)[:, 0].real
    f = f / np.linalg.norm(f)
    lead = f[np.flatnonzero(np.abs(f) > 1e-12)[0]]
    f = f * np.sign(lead)
    f1, f2, f3 = f
    mat = np.array([[0, f1, f2], [f1, 0, f3], [f2, f3, 0]], dtype=complex) / np.sqrt(2.0)
    return PerpOperator(f_perp=mat, f_vector=f)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    empty: bool = False

    @classmethod
    def void(cls):
        return cls(np.nan, np.nan, True)

    def __contains__(self, x):
        return not self.empty and self.lo <= x <= self.hi


# PSD slack for eigenvalues near the boundary; far below the 1e-9 endpoint accuracy
_PSD_SLACK = 1e-13
_COLLAPSE = 1e-12


def _kd_linear_interval(qs, qf, tol):
    lo, hi = -np.inf, np.inf
    for a, b in zip(qs.ravel(), qf.ravel()):
        if b > 1e-13:
            lo = max(lo, -a / b)
        elif b < -1e-13:
            hi = min(hi, -a / b)
        elif a < -tol.eps_pos:
            return None
    if lo > hi:
        if lo - hi > _COLLAPSE:
            return None
        lo = hi = 0.5 * (lo + hi)
    return lo, hi


def _check_in_span(t, sigma):
    basis = span_ab_coords(t)
    target = operator_coords(sigma) * basis_norms(t.dim)
    coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
    residual = float(np.max(np.abs(basis @ coef - target)))
    if residual > 1e-8:
        raise NotInSpan(f"sigma is not in span(A u B) (residual {residual:.3g})")


def x_interval(u, sigma, tol=DEFAULT_TOL, perp=None):
    """Interval of ``x`` for which ``sigma + x F_perp`` is a KD-positive state.

    The KD constraints are nine linear inequalities, solved exactly. On the
    resulting bracket the smallest eigenvalue of ``sigma + x F_perp`` is a
    concave function of ``x``: it is maximised by golden-section search and
    the two crossing points are located by bisection.
    """
    t = as_transition(u, tol)
    _require_real_d3(t)
    sigma = check_operator(sigma, 3, tol)
    if abs(np.trace(sigma).real - 1.0) > tol.eps_eq:
        raise ValidationError("sigma must have unit trace")
    _check_in_span(t, sigma)
    fp = (perp or f_perp(t, tol)).f_perp
    qs = kd_distribution(t, sigma).real
    qf = kd_distribution(t, fp).real
    bracket = _kd_linear_interval(qs, qf, tol)
    if bracket is None:
        return Interval.void()
    lo, hi = bracket

    def lam_min(x):
        return np.linalg.eigvalsh(sigma + x * fp)[0]

    def inside(x):
        return lam_min(x) >= -_PSD_SLACK

    if lo == hi:
        return Interval(lo, hi) if inside(lo) else Interval.void()
    a, b = lo, hi
    g = (np.sqrt(5.0) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = lam_min(c), lam_min(d)
    for _ in range(100):
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = lam_min(d)
        else:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = lam_min(c)
    best = 0.5 * (a + b)
    for cand in (lo, hi):
        if lam_min(cand) > lam_min(best):
            best = cand
    if not inside(best):
        return Interval.void()

    def crossing(inner, outer):
        if inside(outer):
            return outer
        for _ in range(60):
            mid = 0.5 * (inner + outer)
            if inside(mid):
                inner = mid
            else:
                outer = mid
        return inner

    return Interval(crossing(best, lo), crossing(best, hi))


def _weights_state(pa, pb, w):
    d = len(pa)
    return sum(w[i] * pa[i] for i in range(d)) + sum(w[d + j] * pb[j] for j in range(d))


def x_max_search(u, grid=10, seed=0, tol=DEFAULT_TOL):
    """Search for the largest ``x_+(sigma)`` over unit-trace ``sigma`` in ``span(A u B)``.

    Probes the barycenter ``I/3`` first, then ``grid**2`` random weight
    vectors (half convex, half allowed slightly negative), then a local
    random search around the incumbent. Only strict improvements beyond
    1e-12 replace the incumbent. The result is a lower bound on the true
    maximum in general.

    Returns
    -------
    x_max : float
    argmax : ndarray, shape (3, 3)
    """
    t = as_transition(u, tol)
    _require_real_d3(t)
    perp = f_perp(t, tol)
    pa, pb = _basis_projectors(t)
    rng = np.random.default_rng(seed)
    n = 2 * t.dim

    def value(w):
        try:
            iv = x_interval(t, _weights_state(pa, pb, w), tol, perp)
        except NotInSpan:
            return -np.inf
        return -np.inf if iv.empty else iv.hi

    best_w = np.full(n, 1.0 / n)
    best = value(best_w)

    def offer(w):
        nonlocal best, best_w
        v = value(w)
        if v > best + 1e-12:
            best, best_w = v, w

    for k in range(grid * grid):
        w = rng.dirichlet(np.ones(n))
        if k % 2:
            w = w + 0.1 * rng.standard_normal(n)
            w = w - (w.sum() - 1.0) / n
        offer(w)
    for scale in np.geomspace(0.05, 1e-5, 12):
        for _ in range(grid):
            step = scale * rng.standard_normal(n)
            offer(best_w + step - step.mean())
    return float(best), _weights_state(pa, pb, best_w)


# -- pure states ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PureKDState:
    psi: np.ndarray
    n_a: int
    n_b: int
    is_basis: bool
    kd: np.ndarray = field(repr=False)

    @property
    def projector(self):
        return np.outer(self.psi, self.psi.conj())


def two_support_candidates(u):
    """States supported on two ``a`` vectors and orthogonal to one ``b_j``.

    For every pair ``i < k`` and every ``j``: ``psi ~ <b_j|a_k> a_i - <b_j|a_i> a_k``.
    """
    t = as_transition(u)
    out = []
    for i, k in itertools.combinations(range(t.dim), 2):
        for j in range(t.dim):
            psi = np.zeros(t.dim, dtype=complex)
            psi[i] = np.conj(t.u[k, j])
            psi[k] = -np.conj(t.u[i, j])
            out.append(psi / np.linalg.norm(psi))
    return out


def _basis_vectors(t):
    return list(np.eye(t.dim, dtype=complex)) + [t.u[:, j].copy() for j in range(t.dim)]


def _classify_pure(t, candidates, tol):
    kept = []
    for psi in candidates:
        p = projector(psi)
        rep = classify(t, p, tol)
        if not rep.is_kd_positive:
            continue
        if any(np.max(np.abs(s.projector - p)) <= 1e-8 for s in kept):
            continue
        is_basis = rep.support_a == 1 or rep.support_b == 1
        kept.append(PureKDState(psi=psi / np.linalg.norm(psi), n_a=rep.support_a,
                                n_b=rep.support_b, is_basis=is_basis,
                                kd=kd_distribution(t, p)))
    return kept


def enumerate_pure_kd_positive_d3(u, tol=DEFAULT_TOL):
    """All pure KD-positive states of a zero-free 3x3 frame.

    In ``d = 3`` such states have ``n_A + n_B = 4``, so besides the six basis
    states only the nine two-support candidates need to be tested.
    """
    t = as_transition(u, tol)
    if t.dim != 3:
        raise WrongDimension(f"enumeration is implemented for d = 3 only, got {t.dim}")
    t.require_zero_free()
    return _classify_pure(t, _basis_vectors(t) + two_support_candidates(t), tol)


# -- certificates --------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    """``Tr(rho F) = s > h = max over pure KD-positive P of Tr(P F)``."""

    s: float
    h: float
    f_perp: np.ndarray


def beyond_pure_hull_certificate(u, rho, tol=DEFAULT_TOL):
    """Certify ``rho`` lies outside the convex hull of the pure KD-positive states.

    Both orientations ``+F_perp`` and ``-F_perp`` are tried, so the answer
    does not depend on the sign convention of :func:`f_perp`; the returned
    ``f_perp`` is the separating one. Returns ``None`` when neither separates.
    """
    t = as_transition(u, tol)
    _require_real_d3(t)
    rho = check_density(rho, 3, tol)
    if not classify(t, rho, tol).is_kd_positive:
        raise NotKDPositive("state is not KD-positive")
    fp = f_perp(t, tol).f_perp
    pure = enumerate_pure_kd_positive_d3(t, tol)
    for sign in (1.0, -1.0):
        f = sign * fp
        s = float(np.trace(rho @ f).real)
        h = max(float(np.real(st.psi.conj() @ f @ st.psi)) for st in pure)
        if s > h + tol.eps_eq:
            return Certificate(s=s, h=h, f_perp=f)
    return None


# -- sections ------------------------------------------------------------------

@dataclass(frozen=True)
class SectionRow:
    k: float
    x_lo: float
    x_hi: float
    empty: bool


def section_scan(u, anchors=None, steps=101, tol=DEFAULT_TOL):
    """x-intervals along ``sigma(k) = k * anchors[0] + (1 - k) * anchors[1]``.

    The default anchors ``((P_a1 + P_a2) / 2, P_a3)`` give the section through
    ``F_perp``, ``(P_a1 + P_a2) / 2`` and ``P_a3``.
    """
    t = as_transition(u, tol)
    _require_real_d3(t)
    if steps < 1:
        raise ValidationError("steps must be >= 1")
    if anchors is None:
        pa, _ = _basis_projectors(t)
        anchors = (0.5 * (pa[0] + pa[1]), pa[2])
    s0, s1 = (np.asarray(a, dtype=complex) for a in anchors)
    perp = f_perp(t, tol)
    ks = np.linspace(0.0, 1.0, steps) if steps > 1 else np.array([0.0])
    rows = []
    for k in ks:
        iv = x_interval(t, k * s0 + (1 - k) * s1, tol, perp)
        rows.append(SectionRow(float(k), iv.lo, iv.hi, iv.empty))
    return rows


def _fmt(x):
    # + 0.0 turns -0.0 into 0.0
    return "nan" if np.isnan(x) else f"{x + 0.0:.12g}"


def section_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "x_lo", "x_hi", "empty"])
    for r in rows:
        w.writerow([_fmt(r.k), _fmt(r.x_lo), _fmt(r.x_hi), str(r.empty).lower()])
    return buf.getvalue()


# -- the face x = x_max for U* -----------------------------------------------------

HEXAGON_VERTICES = ((0.0, 3 / 8), (0.0, -3 / 8), (3 / 8, 0.0), (-3 / 8, 0.0),
                    (3 / 8, 3 / 8), (-3 / 8, -3 / 8))


@dataclass(frozen=True)
class HexagonPoint:
    lambda1: float
    lambda2: float
    kd_positive: bool
    min_eigenvalue: float
    trace_f_perp: float


def _hexagon_state(t, fp, l1, l2):
    pa, pb = _basis_projectors(t)
    return (np.eye(3) / 3 + fp / (2 * np.sqrt(6.0))
            + l1 * (pa[0] - pb[0]) + l2 * (pa[1] - pb[1]))


def hexagon_report(u=None, scale=1.0, tol=DEFAULT_TOL):
    """Evaluate the six vertices of the top face (optionally scaled)."""
    t = u_star() if u is None else as_transition(u, tol)
    if t.dim != 3 or np.max(np.abs(t.u - u_star().u)) > 1e-12:
        raise WrongMatrix("the hexagon check is specific to U*")
    fp = f_perp(t, tol).f_perp
    out = []
    for l1, l2 in HEXAGON_VERTICES:
        rho = _hexagon_state(t, fp, scale * l1, scale * l2)
        w, _ = hermitian_eigen(rho, tol)
        out.append(HexagonPoint(scale * l1, scale * l2,
                                classify(t, rho, tol).is_kd_positive,
                                float(w[0]), float(np.trace(rho @ fp).real)))
    return out


def y_plus_hexagon_check(u=None, tol=DEFAULT_TOL):
    """The six vertices are KD-positive states on the plane ``Tr(rho F_perp) = x_max``
    and each vertex pushed out by 1% leaves the KD-positive states."""
    target = 1 / (2 * np.sqrt(6.0))
    vertices = hexagon_report(u, 1.0, tol)
    outside = hexagon_report(u, 1.01, tol)
    on_face = all(p.kd_positive and p.min_eigenvalue >= -1e-9
                  and abs(p.trace_f_perp - target) <= 1e-9 for p in vertices)
    excluded = all(not p.kd_positive or p.min_eigenvalue < -1e-9 for p in outside)
    return on_face and excluded


def figure2_rows(steps=200):
    """``(curve, lambda1, lambda2)`` rows: hexagon boundary, ellipse, vertices."""
    r = 3 / 8
    hexagon = [(r, 0.0), (r, r), (0.0, r), (-r, 0.0), (-r, -r), (0.0, -r), (r, 0.0)]
    rows = [("hexagon", a, b) for a, b in hexagon]
    # l1^2 + l2^2 - l1 l2 = r^2, parametrised along its principal axes
    for s in np.linspace(0.0, 2 * np.pi, max(steps, 3)):
        rows.append(("ellipse", r * (np.cos(s) + np.sin(s) / np.sqrt(3.0)),
                     r * (np.cos(s) - np.sin(s) / np.sqrt(3.0))))
    rows += [("extreme", a, b) for a, b in HEXAGON_VERTICES]
    return rows


# -- MUB support law -------------------------------------------------------------

@dataclass(frozen=True)
class MUBSupportReport:
    d: int
    n_structured: int
    n_random: int
    n_positive: int
    nonbasis_positive: list
    law_violations: int
    prime: bool

    @property
    def basis_only(self):
        return not self.nonbasis_positive

    @property
    def passed(self):
        return self.law_violations == 0 and (not self.prime or self.basis_only)


def mub_support_law_check(u, samples=1000, seed=0, tol=DEFAULT_TOL):
    """Check ``n_A n_B = d`` on every pure KD-positive state found.

    The candidates are the ``2d`` basis states, the two-support states of
    :func:`two_support_candidates` and ``samples`` Haar-random pure states.
    In prime dimension the only positive states found must be basis states.
    """
    t = as_transition(u, tol)
    if not t.is_mub:
        raise NotMUB("overlaps are not all of modulus 1/sqrt(d)")
    structured = _classify_pure(t, _basis_vectors(t) + two_support_candidates(t), tol)
    found = list(structured)
    rng = np.random.default_rng(seed)
    n_done = 0
    while n_done < samples:
        batch = min(4096, samples - n_done)
        psi = rng.standard_normal((batch, t.dim)) + 1j * rng.standard_normal((batch, t.dim))
        psi /= np.linalg.norm(psi, axis=1, keepdims=True)
        # Q_ij = <b_j|a_i> <a_i|psi> <psi|b_j>
        q = t.u.conj()[None] * psi[:, :, None] * (psi.conj() @ t.u)[:, None, :]
        ok = (np.abs(q.imag).max(axis=(1, 2)) <= tol.eps_pos) & (q.real.min(axis=(1, 2)) >= -tol.eps_pos)
        for idx in np.flatnonzero(ok):
            extra = _classify_pure(t, [psi[idx]], tol)
            for st in extra:
                if not any(np.max(np.abs(s.projector - st.projector)) <= 1e-8 for s in found):
                    found.append(st)
        n_done += batch
    violations = sum(1 for s in found if s.n_a * s.n_b != t.dim)
    return MUBSupportReport(d=t.dim, n_structured=len(_basis_vectors(t)) + len(two_support_candidates(t)),
                            n_random=samples, n_positive=len(found),
                            nonbasis_positive=[s for s in found if not s.is_basis],
                            law_violations=violations, prime=_is_prime(t.dim))
