"""Kirkwood-Dirac symbol of an operator, positivity tests and reconstruction.

Conventions
-----------
The two orthonormal bases are ``(a_i)`` and ``(b_j)``. The transition matrix is
``U[i, j] = <a_i|b_j>`` so the columns of ``U`` are the ``b_j`` written in the
``a`` basis. Every operator is stored by its matrix in the ``a`` basis,
``F[i, k] = <a_i|F|a_k>``; its ``b``-basis matrix is ``U^H F U``.

With these conventions the KD symbol is

    Q[i, j] = <a_i|F|b_j> <b_j|a_i> = (F @ U)[i, j] * conj(U[i, j]).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimMismatch, NotDensityMatrix, NotUnitary, ZeroOverlap
from .linalg import DEFAULT_TOL, check_hermitian, check_square, hermitian_eigen

__all__ = [
    "TransitionMatrix",
    "PositivityReport",
    "as_transition",
    "check_operator",
    "check_density",
    "projector",
    "kd_distribution",
    "marginals",
    "classify",
    "support_counts",
    "reconstruct",
    "overlap_trace",
]

UNITARITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Unitary matrix of overlaps ``u[i, j] = <a_i|b_j>`` between two bases.

    Construct through :func:`as_transition` (or the constructors in
    :mod:`kdpos.bases`), which checks unitarity. The underlying array is
    made read-only.
    """

    u: np.ndarray
    eps_pos: float = DEFAULT_TOL.eps_pos
    name: str = field(default="", compare=False)

    def __post_init__(self):
        self.u.setflags(write=False)

    @property
    def dim(self):
        return self.u.shape[0]

    @property
    def m_ab(self):
        """Smallest overlap modulus ``min |<a_i|b_j>|``."""
        return float(np.min(np.abs(self.u)))

    @property
    def big_m_ab(self):
        """Largest overlap modulus ``max |<a_i|b_j>|``."""
        return float(np.max(np.abs(self.u)))

    @property
    def zero_free(self):
        return self.m_ab > self.eps_pos

    @property
    def is_real(self):
        return bool(np.max(np.abs(self.u.imag)) <= 1e-12)

    @property
    def is_mub(self):
        return bool(np.max(np.abs(np.abs(self.u) - 1 / np.sqrt(self.dim))) <= 1e-9)

    def require_zero_free(self):
        if not self.zero_free:
            raise ZeroOverlap(
                f"transition matrix has a (near) zero entry: m_AB = {self.m_ab:.3g}")
        return self

    def __array__(self, dtype=None, copy=None):
        return self.u if dtype is None else self.u.astype(dtype)

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<TransitionMatrix{label} d={self.dim} m_AB={self.m_ab:.4g}>"


def as_transition(u, tol=DEFAULT_TOL, name=""):
    """Validate ``u`` as a unitary transition matrix.

    Accepts an existing :class:`TransitionMatrix` (returned as is) or any
    square array. Raises :class:`~kdpos.exceptions.NotUnitary` when
    ``max |u^H u - I| > 1e-10``.
    """
    if isinstance(u, TransitionMatrix):
        return u
    a = np.array(check_square(u, "transition matrix"), dtype=complex)
    dev = np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0])))
    if dev > UNITARITY_TOL:
        raise NotUnitary(f"transition matrix is not unitary (max |U^H U - I| = {dev:.3g})")
    return TransitionMatrix(a, eps_pos=tol.eps_pos, name=name)


def check_operator(f, dim=None, tol=DEFAULT_TOL):
    a = check_hermitian(f, tol, "operator")
    if dim is not None and a.shape[0] != dim:
        raise DimMismatch(f"operator has dimension {a.shape[0]}, expected {dim}")
    return a


def check_density(rho, dim=None, tol=DEFAULT_TOL):
    """Validate a density matrix: Hermitian, unit trace, no negative eigenvalue."""
    a = check_operator(rho, dim, tol)
    tr = np.trace(a).real
    if abs(tr - 1.0) > tol.eps_eq:
        raise NotDensityMatrix(f"trace is {tr:.12g}, expected 1")
    w, _ = hermitian_eigen(a, tol)
    if w[0] < -tol.eps_pos:
        raise NotDensityMatrix(f"smallest eigenvalue {w[0]:.3g} is negative")
    return a


def projector(psi):
    """Rank-one projector ``|psi><psi|`` of a (normalised on the fly) vector."""
    v = np.asarray(psi, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def kd_distribution(u, f):
    """KD symbol ``Q(F)`` of a Hermitian operator ``F`` (``a``-basis matrix)."""
    t = as_transition(u)
    a = check_operator(f, t.dim)
    return (a @ t.u) * t.u.conj()


def marginals(q):
    """Row sums, column sums and total of a KD matrix."""
    q = np.asarray(q)
    return q.sum(axis=1), q.sum(axis=0), q.sum()


@dataclass(frozen=True)
class PositivityReport:
    is_kd_real: bool
    is_kd_positive: bool
    min_real_part: float
    max_abs_imag: float
    support_a: int
    support_b: int


def support_counts(u, f, tol=DEFAULT_TOL):
    """``(n_A, n_B)``: number of basis vectors with non-negligible weight.

    For a pure state ``|psi><psi|`` this counts amplitudes with
    ``|<a_i|psi>| > sqrt(eps_pos)`` (resp. ``<b_j|psi>``), which is the same as
    thresholding the diagonal of ``F`` in each basis at ``eps_pos``.
    """
    t = as_transition(u)
    a = check_operator(f, t.dim, tol)
    diag_a = np.diag(a).real
    diag_b = np.einsum("ij,ik,kj->j", t.u.conj(), a, t.u).real
    return int(np.count_nonzero(diag_a > tol.eps_pos)), int(np.count_nonzero(diag_b > tol.eps_pos))


def classify(u, f, tol=DEFAULT_TOL):
    q = kd_distribution(u, f)
    max_imag = float(np.max(np.abs(q.imag)))
    min_real = float(np.min(q.real))
    is_real = max_imag <= tol.eps_pos
    n_a, n_b = support_counts(u, f, tol)
    return PositivityReport(
        is_kd_real=is_real,
        is_kd_positive=is_real and min_real >= -tol.eps_pos,
        min_real_part=min_real,
        max_abs_imag=max_imag,
        support_a=n_a,
        support_b=n_b,
    )


def reconstruct(u, q, tol=DEFAULT_TOL):
    """Invert the KD map: recover ``F`` from ``Q(F)``.

    Uses ``F[i, k] = sum_j Q[i, j] <b_j|a_k> / <b_j|a_i>``, which needs every
    overlap to be non-zero. The result is returned as computed, without
    symmetrisation, so a ``q`` outside the range of the KD map shows up as a
    non-Hermitian output.
    """
    t = as_transition(u, tol).require_zero_free()
    q = np.asarray(q, dtype=complex)
    if q.shape != (t.dim, t.dim):
        raise DimMismatch(f"KD matrix has shape {q.shape}, expected {(t.dim, t.dim)}")
    # <b_j|a_k> = conj(U[k, j])
    return (q / t.u.conj()) @ t.u.T.conj()


def overlap_trace(u, f, g, tol=DEFAULT_TOL):
    """``Tr(FG)`` evaluated from the two KD symbols."""
    t = as_transition(u, tol).require_zero_free()
    qf = kd_distribution(t, f)
    qg = kd_distribution(t, g)
    return float(np.sum(qf * qg.conj() / np.abs(t.u) ** 2).real)
