"""
Hypothesis contrast matrices and their projections
"""

import logging
from typing import List, Optional

import numpy as np

from ..core.constants import CONTRAST_ROW_SUM_TOL, ERROR_INVALID_DESIGN, PROJECTION_TOL
from ..models.estimates import ContrastSpec, HypothesisKind
from ..utils.errors import DimensionMismatchError, ErrorType, InvalidDesignError, RankTestError
from ..utils.numerics import centering_matrix, kron, matrix_rank, pinv, symmetrize

logger = logging.getLogger(__name__)

HYPOTHESIS_LABELS = {
    HypothesisKind.GROUP: "Group",
    HypothesisKind.TIME: "Time",
    HypothesisKind.INTERACTION: "Group x Time",
}


def supported(kind: HypothesisKind, a: int, d: int) -> bool:
    """Whether a canonical hypothesis is testable for the design"""
    if kind == HypothesisKind.GROUP:
        return a >= 2
    if kind == HypothesisKind.TIME:
        return d >= 2
    if kind == HypothesisKind.INTERACTION:
        return a >= 2 and d >= 2
    return False


def canonical_kinds(a: int, d: int) -> List[HypothesisKind]:
    return [k for k in HYPOTHESIS_LABELS if supported(k, a, d)]


def projection(matrix: np.ndarray, rtol: Optional[float] = None) -> np.ndarray:
    """
    T = C^T (C C^T)^+ C, the orthogonal projector onto the row space of C.

    Raises:
        RankTestError: (processing_error) T is not idempotent to PROJECTION_TOL
    """
    matrix = np.asarray(matrix, dtype=float)
    proj = symmetrize(matrix.T @ pinv(matrix @ matrix.T, rtol) @ matrix)
    defect = float(np.max(np.abs(proj @ proj - proj), initial=0.0))
    if defect > PROJECTION_TOL:
        raise RankTestError(
            ErrorType.PROCESSING_ERROR,
            f"contrast projection is not idempotent (max |T T - T| = {defect:.3g})",
            details={"defect": defect, "shape": list(matrix.shape)}
        )
    return proj


def hypothesis_matrix(a: int, d: int, kind: HypothesisKind) -> ContrastSpec:
    """
    Canonical contrasts on the group-major effect vector.

    GROUP:        P_a (x) (1/d) 1_d^T
    TIME:         (1/a) 1_a^T (x) P_d
    INTERACTION:  P_a (x) P_d
    """
    kind = HypothesisKind(kind)
    if a < 1 or d < 1 or not supported(kind, a, d):
        raise InvalidDesignError(
            ERROR_INVALID_DESIGN.format(kind=kind.value, a=a, d=d), kind=kind.value, a=a, d=d
        )

    if kind == HypothesisKind.GROUP:
        matrix = kron(centering_matrix(a), np.full((1, d), 1.0 / d))
    elif kind == HypothesisKind.TIME:
        matrix = kron(np.full((1, a), 1.0 / a), centering_matrix(d))
    else:
        matrix = kron(centering_matrix(a), centering_matrix(d))

    return ContrastSpec(
        matrix=matrix,
        projection=projection(matrix),
        kind=kind,
        label=HYPOTHESIS_LABELS[kind],
        rank=matrix_rank(matrix),
    )


def custom_contrast(matrix: np.ndarray, a: int, d: int, label: str = "Custom") -> ContrastSpec:
    """
    User supplied contrast with rows summing to zero.

    Raises:
        DimensionMismatchError: column count differs from a*d
        InvalidDesignError: rows do not sum to zero, or C is zero
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.ndim != 2 or matrix.shape[1] != a * d:
        raise DimensionMismatchError(
            f"contrast must have a*d = {a * d} columns", expected=a * d, actual=matrix.shape
        )
    row_sums = matrix.sum(axis=1)
    if np.max(np.abs(row_sums)) > CONTRAST_ROW_SUM_TOL:
        raise InvalidDesignError(
            f"contrast rows must sum to zero (max |row sum| = {np.max(np.abs(row_sums)):.3g})",
            kind=HypothesisKind.CUSTOM.value, a=a, d=d
        )
    rank = matrix_rank(matrix)
    if rank == 0:
        raise InvalidDesignError("contrast matrix is zero", kind=HypothesisKind.CUSTOM.value, a=a, d=d)

    logger.debug(f"Custom contrast '{label}' with {matrix.shape[0]} rows, rank {rank}")
    return ContrastSpec(
        matrix=matrix,
        projection=projection(matrix),
        kind=HypothesisKind.CUSTOM,
        label=label,
        rank=rank,
    )
