"""Dense complex-matrix kernels used by the detector.

Thin, contract-checked wrappers over LAPACK (through numpy/scipy). The two
nontrivial kernels are an overdetermined least-squares solve and a Hermitian
eigendecomposition; both enforce the conventions the receiver relies on
(QR-based solve with an explicit rank check, eigenvalues sorted descending).
Tolerances are fixed constants on purpose: callers must be able to test
against them.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionMismatch, NotHermitian, RankDeficient

# Rank tolerance: smallest over largest column norm of the triangular factor.
RANK_TOL = 1e-10
# Elementwise Hermitian symmetry tolerance, relative to max(1, max|H|).
HERMITIAN_TOL = 1e-10


def _as_matrix(a, name: str) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be a 2-D matrix, got ndim={a.ndim}")
    return a.astype(np.complex128, copy=False)


def conj_transpose(a) -> np.ndarray:
    """Conjugate transpose A^H."""
    return _as_matrix(a, "a").conj().T


def matmul(a, b) -> np.ndarray:
    a = _as_matrix(a, "a")
    b = _as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"matmul: inner dimensions {a.shape} x {b.shape}")
    return a @ b


def matvec(a, x) -> np.ndarray:
    a = _as_matrix(a, "a")
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1 or a.shape[1] != x.shape[0]:
        raise DimensionMismatch(f"matvec: {a.shape} with vector of shape {x.shape}")
    return a @ x


def hadamard(a, b) -> np.ndarray:
    """Elementwise product; operands must have identical shapes."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise DimensionMismatch(f"hadamard: shapes {a.shape} vs {b.shape}")
    return a * b


def least_squares_solve(a, b) -> np.ndarray:
    """Minimize ||A X - B||_F for overdetermined A via Householder QR.

    Parameters
    ----------
    a : (m, n) complex matrix, m >= n, full column rank.
    b : (m,) vector or (m, r) matrix of right-hand sides.

    Returns
    -------
    X with shape (n,) or (n, r) matching b.

    Raises
    ------
    DimensionMismatch
        If m < n or the right-hand side row count differs from m.
    RankDeficient
        If the smallest diagonal magnitude of the triangular factor falls
        below RANK_TOL times the largest (numerical column-rank loss).

    Notes
    -----
    QR rather than normal equations: the support columns handed in by the
    pursuit can be strongly correlated for adjacent delays, and squaring
    the condition number there is not acceptable.
    """
    a = _as_matrix(a, "a")
    b_arr = np.asarray(b, dtype=np.complex128)
    vector_rhs = b_arr.ndim == 1
    if vector_rhs:
        b_arr = b_arr[:, None]
    elif b_arr.ndim != 2:
        raise DimensionMismatch(f"b must be 1-D or 2-D, got ndim={b_arr.ndim}")
    m, n = a.shape
    if m < n:
        raise DimensionMismatch(f"least_squares_solve needs m >= n, got {a.shape}")
    if b_arr.shape[0] != m:
        raise DimensionMismatch(f"rhs has {b_arr.shape[0]} rows, expected {m}")

    q, r = np.linalg.qr(a, mode="reduced")
    diag = np.abs(np.diag(r))
    if diag.size and diag.min() < RANK_TOL * diag.max():
        raise RankDeficient(
            f"triangular factor column-norm ratio {diag.min():.3e}/{diag.max():.3e}"
        )
    x = solve_triangular(r, q.conj().T @ b_arr, lower=False)
    return x[:, 0] if vector_rhs else x


def hermitian_eig(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns (eigenvalues, eigenvectors) with eigenvalues[0] the largest and
    eigenvectors[:, i] the unit-norm eigenvector for eigenvalues[i]. Callers
    rely on the dominant eigenvector being column 0.
    """
    h = _as_matrix(h, "h")
    if h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"hermitian_eig needs a square matrix, got {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)
    asym = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    if asym > HERMITIAN_TOL * scale:
        raise NotHermitian(f"max |H - H^H| = {asym:.3e} exceeds tolerance")
    w, v = np.linalg.eigh(h)
    return w[::-1].copy(), v[:, ::-1].copy()
