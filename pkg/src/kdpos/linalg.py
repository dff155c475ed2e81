"""Dense complex linear algebra used throughout the package.

Thin, contract-checked wrappers around LAPACK (via numpy) plus a Gram-Schmidt
routine and the shared tolerance policy. Dimensions in this package never
exceed a few dozen, so nothing here tries to be clever about performance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DependentColumns, NotHermitian, NotSquare

__all__ = [
    "TolerancePolicy",
    "DEFAULT_TOL",
    "check_square",
    "check_hermitian",
    "hermitian_eigen",
    "numerical_rank",
    "null_space",
    "gram_schmidt",
    "gram_schmidt_completion",
    "projector_onto",
    "subspace_distance",
]


@dataclass(frozen=True)
class TolerancePolicy:
    """Numerical slack used by the positivity, rank and equality tests.

    Attributes
    ----------
    eps_rank : float
        Singular values below ``eps_rank * sigma_max * max(shape)`` count as zero.
    eps_pos : float
        One-sided slack for nonnegativity (``x >= -eps_pos`` passes).
    eps_eq : float
        Absolute slack for equalities (hermiticity, trace, linear relations).
    """

    eps_rank: float = 1e-10
    eps_pos: float = 1e-9
    eps_eq: float = 1e-9

    def __post_init__(self):
        for name in ("eps_rank", "eps_pos", "eps_eq"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a finite positive number, got {value!r}")


DEFAULT_TOL = TolerancePolicy()


def check_square(m, name="matrix"):
    """Return ``m`` as a finite 2-d complex array, raising if it is not square."""
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise NotSquare(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    a = a.astype(complex, copy=False)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def check_hermitian(m, tol=DEFAULT_TOL, name="matrix"):
    a = check_square(m, name)
    dev = np.max(np.abs(a - a.conj().T))
    if dev > tol.eps_eq:
        raise NotHermitian(f"{name} is not Hermitian (max |m - m^H| = {dev:.3g})")
    return a


def hermitian_eigen(m, tol=DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    m : array_like, shape (d, d)
        Hermitian within ``tol.eps_eq`` (entrywise).
    tol : TolerancePolicy

    Returns
    -------
    eigenvalues : ndarray, shape (d,)
        Real, ascending.
    eigenvectors : ndarray, shape (d, d)
        Unitary; column ``k`` belongs to ``eigenvalues[k]``.
    """
    a = check_hermitian(m, tol)
    # symmetrise so LAPACK sees an exactly Hermitian input
    a = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(a)
    return w, v


def numerical_rank(m, tol=DEFAULT_TOL):
    a = np.asarray(m)
    if a.size == 0:
        raise ValueError("numerical_rank needs a non-empty matrix")
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    cutoff = tol.eps_rank * s[0] * max(a.shape)
    return int(np.count_nonzero(s > cutoff))


def null_space(m, tol=DEFAULT_TOL, rank=None):
    """Orthonormal basis (as columns) of the right null space of ``m``.

    The rank cutoff is the one of :func:`numerical_rank` unless ``rank`` is
    given explicitly.
    """
    a = np.asarray(m)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    if rank is None:
        rank = 0 if s.size == 0 or s[0] == 0.0 else int(
            np.count_nonzero(s > tol.eps_rank * s[0] * max(a.shape)))
    return vh[rank:].conj().T


def gram_schmidt(cols, tol=DEFAULT_TOL):
    """Orthonormalise the columns of ``cols`` in order.

    Classical Gram-Schmidt with one reorthogonalisation pass ("twice is
    enough"). Column ``k`` of the result spans the same flag as the first
    ``k + 1`` input columns; an input column that is already orthonormal to
    its predecessors is returned unchanged up to rounding.

    Raises
    ------
    DependentColumns
        If a column is (numerically) in the span of the preceding ones.
    """
    a = np.array(cols, dtype=complex, ndmin=2)
    n, k = a.shape
    out = np.zeros((n, k), dtype=complex)
    for j in range(k):
        v = a[:, j].copy()
        norm0 = np.linalg.norm(v)
        for _ in range(2):
            v -= out[:, :j] @ (out[:, :j].conj().T @ v)
        norm = np.linalg.norm(v)
        if norm0 == 0.0 or norm <= np.sqrt(tol.eps_eq) * norm0:
            raise DependentColumns(f"column {j} is linearly dependent on the previous ones")
        out[:, j] = v / norm
    return out


def gram_schmidt_completion(cols, tol=DEFAULT_TOL):
    """Complete a set of orthonormal columns to a unitary matrix.

    Parameters
    ----------
    cols : array_like, shape (d, k) or (d,)
        Linearly independent unit vectors. If they are orthonormal they are
        kept verbatim as the first ``k`` columns of the output.

    Returns
    -------
    ndarray, shape (d, d)
        Unitary matrix. The remaining ``d - k`` columns come from running
        Gram-Schmidt over the standard basis vectors, skipping those already
        in the span.
    """
    a = np.array(cols, dtype=complex)
    if a.ndim == 1:
        a = a[:, None]
    d, k = a.shape
    if k > d:
        raise DependentColumns(f"{k} columns cannot be independent in dimension {d}")
    q = gram_schmidt(a, tol)
    basis = list(q.T)
    for e in np.eye(d, dtype=complex):
        if len(basis) == d:
            break
        cur = np.array(basis).T
        v = e - cur @ (cur.conj().T @ e)
        v -= cur @ (cur.conj().T @ v)
        norm = np.linalg.norm(v)
        # a standard basis vector always has residual >= 1/sqrt(d) for some e
        if norm > 0.5 / np.sqrt(d):
            basis.append(v / norm)
    return np.array(basis).T


def projector_onto(basis_cols):
    """Orthogonal projector onto the column span of ``basis_cols``."""
    b = np.asarray(basis_cols)
    if b.size == 0:
        n = b.shape[0]
        return np.zeros((n, n), dtype=b.dtype)
    q, _ = np.linalg.qr(b)
    return q @ q.conj().T


def subspace_distance(basis1, basis2):
    """``max |P1 - P2|`` between the orthogonal projectors of two column spans."""
    return float(np.max(np.abs(projector_onto(basis1) - projector_onto(basis2))))
