import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kdpos.bases import dft, haar_random, perturb_columns, sylvester_hadamard_mub, u_star, wigner_small_d
from kdpos.core import kd_distribution
from kdpos.exceptions import NotDFT, NotPrime, NotReal, ValidationError, ZeroOverlap
from kdpos.real_space import (SCAN_HEADER, assemble_im_q, basis_norms, conjecture_scan,
                              coords_to_operator, derive_seed, dft_kernel_report, hermitian_basis,
                              is_minimal_polytope, kd_real_dimension, operator_coords,
                              span_ab_coords, verify_dft_kernel_structure,
                              verify_real_symmetric_structure)


def test_hermitian_basis_order():
    b = hermitian_basis(3)
    assert b.shape == (9, 3, 3)
    np.testing.assert_array_equal(b[0], np.diag([1, 0, 0]))
    # first off-diagonal pair is (0, 1), then (0, 2), then (1, 2)
    assert b[3, 0, 1] == 1 and b[3, 1, 0] == 1
    assert b[5, 1, 2] == 1
    assert b[6, 0, 1] == 1j and b[6, 1, 0] == -1j
    gram = np.einsum("nij,mij->nm", b.conj(), b).real
    np.testing.assert_allclose(gram, np.diag(basis_norms(3) ** 2))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 31))
def test_coords_roundtrip(d, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = a + a.conj().T
    np.testing.assert_allclose(coords_to_operator(operator_coords(h)), h, atol=1e-14)


def test_im_q_matrix_columns():
    t = haar_random(3, 4)
    imq = assemble_im_q(t)
    for n, e in enumerate(hermitian_basis(3)):
        np.testing.assert_allclose(imq.matrix[:, n], kd_distribution(t, e).imag.ravel(), atol=1e-15)


def test_kernel_is_kd_real_and_orthonormal():
    t = haar_random(4, 8)
    imq = assemble_im_q(t)
    for f in imq.kernel_basis:
        assert np.max(np.abs(kd_distribution(t, f).imag)) < 1e-12
    gram = np.einsum("nij,mij->nm", imq.kernel_basis.conj(), imq.kernel_basis).real
    np.testing.assert_allclose(gram, np.eye(imq.kernel_dim), atol=1e-12)


def test_known_dimensions():
    # frozen: non-prime DFTs exceed 2d - 1
    assert [kd_real_dimension(dft(d)) for d in (4, 6, 8, 9)] == [8, 15, 20, 21]
    assert kd_real_dimension(u_star()) == 6
    assert kd_real_dimension(np.eye(3)) == 9  # Im Q vanishes identically


def test_minimal_polytope():
    assert is_minimal_polytope(dft(7))
    assert not is_minimal_polytope(u_star())
    with pytest.raises(ZeroOverlap):
        is_minimal_polytope(np.eye(2))


def test_perturbed_ustar_becomes_minimal():
    assert kd_real_dimension(perturb_columns(u_star(), 0.05)) == 5


def test_span_ab_is_in_kernel():
    t = haar_random(5, 2)
    imq = assemble_im_q(t)
    span = span_ab_coords(t)
    assert np.linalg.matrix_rank(span) == 2 * 5 - 1
    proj = imq.kernel_coords.T @ imq.kernel_coords
    np.testing.assert_allclose(proj @ span, span, atol=1e-10)


def test_dft_kernel_report_errors():
    with pytest.raises(NotPrime):
        dft_kernel_report(dft(4))
    with pytest.raises(NotDFT):
        dft_kernel_report(haar_random(3, 0))
    assert verify_dft_kernel_structure(dft(11))


def test_real_symmetric_structure():
    assert verify_real_symmetric_structure(sylvester_hadamard_mub(3))
    assert verify_real_symmetric_structure(wigner_small_d(2, 1.0))
    with pytest.raises(NotReal):
        verify_real_symmetric_structure(dft(3))


def test_derive_seed_frozen():
    assert derive_seed(7, 3, 0) == 5061563556724077661
    assert derive_seed(0, 2, 5) == 15688837309020585415


def test_scan_csv_and_cap():
    rep = conjecture_scan([3], 1, seed=7)
    lines = rep.to_csv().splitlines()
    assert lines[0] == ",".join(SCAN_HEADER)
    assert lines[1] == "3,0,5061563556724077661,4,5,true"
    with pytest.raises(ValidationError):
        conjecture_scan([17], 1, seed=0)


def test_scan_independent_of_workers():
    a = conjecture_scan([2, 3, 4], 6, seed=3, workers=1).to_csv()
    b = conjecture_scan([2, 3, 4], 6, seed=3, workers=2).to_csv()
    assert a == b


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2 ** 31))
def test_dimension_bounds(d, seed):
    # span(A u B) has dimension 2d - 1 and always sits inside V_KDr
    dim = kd_real_dimension(haar_random(d, seed))
    assert 2 * d - 1 <= dim <= d * d
