"""The real-linear map ``F -> Im Q(F)`` and the space of KD-real operators.

Hermitian operators are expanded on the fixed real basis

* ``E_kk`` for ``k = 0..d-1``,
* ``E_kj + E_jk`` for ``k < j`` (lexicographic),
* ``i (E_kj - E_jk)`` for ``k < j`` (lexicographic),

and ``Im Q`` is represented by the ``d^2 x d^2`` real matrix whose column ``n``
is ``Im Q(basis[n])`` flattened row-major. The KD-real operators form its
kernel, whose dimension is ``2d - 1`` exactly when every KD-positive state is a
mixture of basis states.
"""

from __future__ import annotations

import csv
import io
import itertools
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bases import dft, haar_random
from .core import as_transition
from .exceptions import NotDFT, NotPrime, NotReal, ValidationError
from .linalg import DEFAULT_TOL, null_space, numerical_rank, subspace_distance

__all__ = [
    "ImQMap",
    "hermitian_basis",
    "basis_norms",
    "operator_coords",
    "coords_to_operator",
    "assemble_im_q",
    "kd_real_dimension",
    "is_minimal_polytope",
    "span_ab_coords",
    "DFTKernelReport",
    "dft_kernel_report",
    "verify_dft_kernel_structure",
    "real_symmetric_residual",
    "verify_real_symmetric_structure",
    "ScanRow",
    "ScanReport",
    "derive_seed",
    "conjecture_scan",
    "SCAN_HEADER",
    "MAX_SCAN_DIM",
]

MAX_SCAN_DIM = 16
SCAN_HEADER = ("d", "sample", "seed", "rank_imq", "dim_vkdr", "is_minimal")


def _pairs(d):
    return list(itertools.combinations(range(d), 2))


def hermitian_basis(d):
    """The ``d^2`` basis operators, stacked into shape ``(d^2, d, d)``."""
    out = np.zeros((d * d, d, d), dtype=complex)
    for k in range(d):
        out[k, k, k] = 1.0
    pairs = _pairs(d)
    off = len(pairs)
    for n, (k, j) in enumerate(pairs):
        out[d + n, k, j] = out[d + n, j, k] = 1.0
        out[d + off + n, k, j] = 1j
        out[d + off + n, j, k] = -1j
    return out


def basis_norms(d):
    """Hilbert-Schmidt norms of the basis operators (1 on the diagonal, sqrt 2 else)."""
    norms = np.full(d * d, np.sqrt(2.0))
    norms[:d] = 1.0
    return norms


def operator_coords(f):
    """Real coordinates of a Hermitian matrix on :func:`hermitian_basis`."""
    f = np.asarray(f)
    d = f.shape[0]
    pairs = _pairs(d)
    rows = [k for k, _ in pairs]
    cols = [j for _, j in pairs]
    return np.concatenate([np.diag(f).real, f[rows, cols].real, f[rows, cols].imag])


def coords_to_operator(c):
    c = np.asarray(c, dtype=float)
    d = int(round(np.sqrt(c.size)))
    return np.tensordot(c, hermitian_basis(d), axes=1)


@dataclass(frozen=True, eq=False)
class ImQMap:
    """Matrix of ``Im Q`` with its rank and an orthonormal kernel basis.

    ``kernel_basis`` has shape ``(n_kernel, d, d)``; its elements are
    Hilbert-Schmidt orthonormal Hermitian operators. ``kernel_coords`` holds
    the same vectors in the *normalised* basis coordinates (basis operators
    divided by :func:`basis_norms`), where the HS inner product is the
    Euclidean one.
    """

    dim: int
    matrix: np.ndarray
    rank: int
    kernel_basis: np.ndarray
    kernel_coords: np.ndarray

    @property
    def kernel_dim(self):
        return self.kernel_basis.shape[0]


def assemble_im_q(u, tol=DEFAULT_TOL):
    t = as_transition(u, tol)
    d = t.dim
    basis = hermitian_basis(d)
    q = np.einsum("nik,kj->nij", basis, t.u) * t.u.conj()[None]
    matrix = q.imag.reshape(d * d, d * d).T
    rank = numerical_rank(matrix, tol)
    norms = basis_norms(d)
    kernel = null_space(matrix / norms[None, :], tol, rank=rank)
    # re-orthonormalise; SVD output already is, this only removes rounding drift
    if kernel.shape[1]:
        kernel, _ = np.linalg.qr(kernel)
    kernel_ops = np.tensordot(kernel.T / norms[None, :], basis, axes=1)
    return ImQMap(dim=d, matrix=matrix, rank=rank, kernel_basis=kernel_ops,
                  kernel_coords=kernel.T)


def kd_real_dimension(u, tol=DEFAULT_TOL):
    t = as_transition(u, tol)
    return t.dim ** 2 - assemble_im_q(t, tol).rank


def is_minimal_polytope(u, tol=DEFAULT_TOL):
    """True iff the KD-positive states are exactly the mixtures of basis states.

    Decided through ``dim V_KDr == 2d - 1``, which is only meaningful for a
    zero-free transition matrix.
    """
    t = as_transition(u, tol).require_zero_free()
    return kd_real_dimension(t, tol) == 2 * t.dim - 1


def span_ab_coords(u):
    """Normalised coordinates of the ``2d`` basis projectors, as columns."""
    t = as_transition(u)
    d = t.dim
    norms = basis_norms(d)
    projs = [np.outer(e, e.conj()) for e in np.eye(d, dtype=complex)]
    projs += [np.outer(t.u[:, j], t.u[:, j].conj()) for j in range(d)]
    return np.array([operator_coords(p) * norms for p in projs]).T


def _is_prime(n):
    if n < 2:
        return False
    return all(n % k for k in range(2, int(n ** 0.5) + 1))


@dataclass(frozen=True)
class DFTKernelReport:
    p: int
    kernel_dim: int
    relation_dim: int
    projector_residual: float
    max_relation_violation: float

    @property
    def passed(self):
        return (self.kernel_dim == self.relation_dim == 2 * self.p - 1
                and self.projector_residual <= 1e-8
                and self.max_relation_violation <= 1e-8)


def _cyclic_diagonal_constraints(p):
    """Real constraint matrix for ``F[i, i+k] == F[i-k, i]`` (indices mod p)."""
    norms = basis_norms(p)
    basis = hermitian_basis(p) / norms[:, None, None]
    rows = []
    for i in range(p):
        for k in range(1, p):
            diff = basis[:, i, (i + k) % p] - basis[:, (i - k) % p, i]
            rows.append(diff.real)
            rows.append(diff.imag)
    return np.array(rows)


def dft_kernel_report(u, tol=DEFAULT_TOL):
    """Compare the kernel of ``Im Q`` for a prime DFT with the cyclic-diagonal space.

    The second space, Hermitian matrices constant along each cyclic
    off-diagonal, is built as the null space of its defining linear relations,
    independently of ``Im Q``.
    """
    t = as_transition(u, tol)
    p = t.dim
    if not _is_prime(p):
        raise NotPrime(f"dimension {p} is not prime")
    if np.max(np.abs(t.u - dft(p).u)) > 1e-12:
        raise NotDFT("transition matrix is not the DFT matrix")
    imq = assemble_im_q(t, tol)
    constraints = _cyclic_diagonal_constraints(p)
    relation_space = null_space(constraints, tol)
    kernel = imq.kernel_coords.T
    violation = float(np.max(np.abs(constraints @ kernel))) if kernel.size else 0.0
    residual = subspace_distance(kernel, relation_space)
    return DFTKernelReport(p=p, kernel_dim=kernel.shape[1], relation_dim=relation_space.shape[1],
                           projector_residual=residual, max_relation_violation=violation)


def verify_dft_kernel_structure(u, tol=DEFAULT_TOL):
    return dft_kernel_report(u, tol).passed


def real_symmetric_residual(u, tol=DEFAULT_TOL):
    """Projector distance between ``Ker Im Q`` and the real symmetric matrices.

    Returns ``(kernel_dim, residual)``.
    """
    t = as_transition(u, tol).require_zero_free()
    if not t.is_real:
        raise NotReal("transition matrix has non-negligible imaginary parts")
    d = t.dim
    imq = assemble_im_q(t, tol)
    n_sym = d * (d + 1) // 2
    sym = np.eye(d * d)[:, :n_sym]
    return imq.kernel_dim, subspace_distance(imq.kernel_coords.T, sym)


def verify_real_symmetric_structure(u, tol=DEFAULT_TOL):
    d = as_transition(u, tol).dim
    kdim, residual = real_symmetric_residual(u, tol)
    return kdim == d * (d + 1) // 2 and residual <= 1e-8


@dataclass(frozen=True)
class ScanRow:
    d: int
    sample: int
    seed: int
    rank_imq: int
    dim_vkdr: int
    is_minimal: bool


@dataclass(frozen=True)
class ScanReport:
    rows: tuple

    def histogram(self):
        """``{d: Counter(dim_vkdr -> count)}``."""
        out = {}
        for r in self.rows:
            out.setdefault(r.d, Counter())[r.dim_vkdr] += 1
        return out

    def minimal_fraction(self):
        out = {}
        for d, hist in self.histogram().items():
            out[d] = hist.get(2 * d - 1, 0) / sum(hist.values())
        return out

    def to_csv(self, fh=None):
        buf = fh if fh is not None else io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SCAN_HEADER)
        for r in self.rows:
            w.writerow([r.d, r.sample, r.seed, r.rank_imq, r.dim_vkdr, str(r.is_minimal).lower()])
        return buf.getvalue() if fh is None else None


def derive_seed(seed, d, index):
    """64-bit seed for sample ``index`` at dimension ``d``; independent of scheduling."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(d), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _scan_one(task):
    d, index, seed, tol = task
    s = derive_seed(seed, d, index)
    rank = assemble_im_q(haar_random(d, s), tol).rank
    dim = d * d - rank
    return ScanRow(d=d, sample=index, seed=s, rank_imq=rank, dim_vkdr=dim,
                   is_minimal=dim == 2 * d - 1)


def conjecture_scan(dims, samples_per_dim, seed, tol=DEFAULT_TOL, workers=1):
    """Sample Haar unitaries and record ``dim V_KDr`` for each.

    Every sample draws from its own seed derived from ``(seed, d, index)``, so
    the rows do not depend on ``workers``.
    """
    dims = [int(d) for d in dims]
    for d in dims:
        if not 2 <= d <= MAX_SCAN_DIM:
            raise ValidationError(f"scan dimensions must lie in [2, {MAX_SCAN_DIM}], got {d}")
    if samples_per_dim < 0:
        raise ValidationError("samples_per_dim must be >= 0")
    tasks = [(d, i, seed, tol) for d in dims for i in range(samples_per_dim)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_one, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        rows = [_scan_one(t) for t in tasks]
    return ScanReport(rows=tuple(rows))
