"""
Dense linear-algebra kernels shared by the estimators and test statistics.

All matrices here are small (at most a*d square), so everything is dense
numpy. Functions accept a leading batch axis where noted; the bootstrap
evaluates many replicates at once through the same code path.
"""

from typing import Optional

import numpy as np
from scipy import special

from .errors import DimensionMismatchError


def default_rtol(shape: tuple) -> float:
    """Relative singular-value cutoff: max(dim) * machine epsilon"""
    return max(shape[-2:]) * np.finfo(float).eps


def pinv(matrix: np.ndarray, rtol: Optional[float] = None) -> np.ndarray:
    """
    Moore-Penrose pseudoinverse via SVD.

    Singular values below rtol * sigma_max are truncated to zero. Accepts a
    stack of matrices (..., m, k); the cutoff is applied per matrix.

    Args:
        matrix: finite real matrix or stack of matrices
        rtol: relative cutoff, defaults to max(dim) * eps

    Returns:
        The pseudoinverse with shape (..., k, m)
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim < 2:
        raise DimensionMismatchError("pinv expects a matrix", expected="ndim >= 2", actual=matrix.ndim)
    if rtol is None:
        rtol = default_rtol(matrix.shape)
    return np.linalg.pinv(matrix, rcond=rtol)


def matrix_rank(matrix: np.ndarray, rtol: Optional[float] = None) -> int:
    """Rank using the same relative cutoff as pinv"""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise DimensionMismatchError("matrix_rank expects a matrix", expected=2, actual=matrix.ndim)
    if matrix.size == 0:
        return 0
    if rtol is None:
        rtol = default_rtol(matrix.shape)
    singular_values = np.linalg.svd(matrix, compute_uv=False)
    if singular_values[0] == 0.0:
        return 0
    return int(np.sum(singular_values > rtol * singular_values[0]))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two matrices"""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionMismatchError("kron expects two matrices", expected=(2, 2), actual=(a.ndim, b.ndim))
    return np.kron(a, b)


def quadform(vector: np.ndarray, matrix: np.ndarray) -> float:
    """v^T M v"""
    vector = np.asarray(vector, dtype=float)
    matrix = np.asarray(matrix, dtype=float)
    if vector.ndim != 1 or matrix.shape != (vector.size, vector.size):
        raise DimensionMismatchError(
            "quadform dimensions disagree",
            expected=(vector.size, vector.size),
            actual=matrix.shape
        )
    return float(vector @ matrix @ vector)


def trace(matrix: np.ndarray) -> float:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError("trace expects a square matrix", actual=matrix.shape)
    return float(np.trace(matrix))


def centering_matrix(m: int) -> np.ndarray:
    """P_m = I_m - J_m / m"""
    return np.eye(m) - np.full((m, m), 1.0 / m)


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    """Mirror the upper triangle so the result is exactly symmetric (batch aware)"""
    upper = np.triu(matrix)
    return upper + np.swapaxes(np.triu(matrix, 1), -1, -2)


def chi2_sf(x: float, dof: float) -> float:
    """
    Upper tail of a chi-square law with continuous dof, via the regularized
    upper incomplete gamma function Q(dof/2, x/2).
    """
    if dof <= 0:
        raise ValueError(f"chi-square dof must be positive, got {dof}")
    if x <= 0.0:
        return 1.0
    return float(special.gammaincc(dof / 2.0, x / 2.0))
