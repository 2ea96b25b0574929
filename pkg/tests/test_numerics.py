"""Linear algebra kernels against numpy/scipy reference results."""

import numpy as np
import pytest

from tsotfs import DimensionMismatch, NotHermitian, RankDeficient
from tsotfs.numerics import (
    conj_transpose,
    hadamard,
    hermitian_eig,
    least_squares_solve,
    matmul,
    matvec,
)


def _crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_least_squares_matches_lstsq_reference():
    rng = np.random.default_rng(0)
    for _ in range(20):
        m = int(rng.integers(4, 30))
        n = int(rng.integers(1, m + 1))
        a = _crandn(rng, m, n)
        b = _crandn(rng, m, 3)
        x = least_squares_solve(a, b)
        x_ref = np.linalg.lstsq(a, b, rcond=None)[0]
        np.testing.assert_allclose(x, x_ref, atol=1e-10)


def test_least_squares_vector_rhs_shape():
    rng = np.random.default_rng(1)
    a = _crandn(rng, 9, 4)
    b = _crandn(rng, 9)
    x = least_squares_solve(a, b)
    assert x.shape == (4,)
    np.testing.assert_allclose(x, np.linalg.lstsq(a, b, rcond=None)[0], atol=1e-10)


def test_least_squares_exact_consistent_system():
    rng = np.random.default_rng(2)
    a = _crandn(rng, 12, 5)
    x_true = _crandn(rng, 5, 2)
    np.testing.assert_allclose(least_squares_solve(a, a @ x_true), x_true, atol=1e-11)


def test_least_squares_dimension_errors():
    rng = np.random.default_rng(3)
    with pytest.raises(DimensionMismatch):
        least_squares_solve(_crandn(rng, 3, 5), _crandn(rng, 3))
    with pytest.raises(DimensionMismatch):
        least_squares_solve(_crandn(rng, 5, 3), _crandn(rng, 4))
    with pytest.raises(DimensionMismatch):
        least_squares_solve(_crandn(rng, 5, 3), _crandn(rng, 5, 2, 2))


def test_least_squares_rank_deficient():
    rng = np.random.default_rng(4)
    col = _crandn(rng, 8)
    a = np.column_stack([col, 2.0 * col])
    with pytest.raises(RankDeficient):
        least_squares_solve(a, _crandn(rng, 8))


def test_hermitian_eig_matches_eigh_descending():
    rng = np.random.default_rng(5)
    for _ in range(10):
        n = int(rng.integers(2, 12))
        h = _crandn(rng, n, n)
        h = h @ h.conj().T + np.eye(n)
        w, v = hermitian_eig(h)
        assert np.all(np.diff(w) <= 1e-12)  # descending
        np.testing.assert_allclose(h @ v, v * w, atol=1e-9)
        w_ref = np.linalg.eigvalsh(h)[::-1]
        np.testing.assert_allclose(w, w_ref, atol=1e-9)


def test_hermitian_eig_rejects_asymmetric_and_nonsquare():
    rng = np.random.default_rng(6)
    h = _crandn(rng, 5, 5)
    h = h @ h.conj().T
    h_bad = h.copy()
    h_bad[0, 1] += 1e-3
    with pytest.raises(NotHermitian):
        hermitian_eig(h_bad)
    with pytest.raises(DimensionMismatch):
        hermitian_eig(_crandn(rng, 4, 5))


def test_hermitian_eig_tolerance_scales_with_magnitude():
    # A 1e-7 asymmetry on a matrix of norm ~1e6 is within the relative
    # tolerance and must be accepted.
    rng = np.random.default_rng(7)
    h = _crandn(rng, 4, 4)
    h = (h @ h.conj().T) * 1e6
    h[0, 1] += 1e-7
    hermitian_eig(h)


def test_elementwise_and_product_helpers():
    rng = np.random.default_rng(8)
    a = _crandn(rng, 3, 4)
    b = _crandn(rng, 4, 2)
    np.testing.assert_allclose(matmul(a, b), a @ b)
    np.testing.assert_allclose(matvec(a, b[:, 0]), a @ b[:, 0])
    np.testing.assert_allclose(hadamard(a, a), a * a)
    np.testing.assert_allclose(conj_transpose(a), a.conj().T)
    with pytest.raises(DimensionMismatch):
        matmul(a, a)
    with pytest.raises(DimensionMismatch):
        matvec(a, b[:, 0][:3])
    with pytest.raises(DimensionMismatch):
        hadamard(a, b)
