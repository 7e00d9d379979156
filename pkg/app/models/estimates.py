"""
Containers for rank tables, effect estimates, covariance estimates and contrasts
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Tuple

import numpy as np

from .dataset import CellCounts


class HypothesisKind(str, Enum):
    """Hypothesis families"""
    GROUP = "group"
    TIME = "time"
    INTERACTION = "interaction"
    CUSTOM = "custom"


@dataclass(frozen=True)
class RankTable:
    """
    Mid-ranks among all N pooled observations.

    ranks[i] is (n_i, d) with 0.0 where unobserved; cell_means[i, j] is the
    mean rank R_ij. over observed subjects of the cell.
    """
    ranks: Tuple[np.ndarray, ...]
    mask: Tuple[np.ndarray, ...]
    cell_means: np.ndarray
    N: int


@dataclass(frozen=True)
class CovarianceEstimate:
    """
    Per-group blocks V_i, the block-diagonal V_n = (+)_i (n/n_i) V_i and
    D_n = diag(V_n).
    """
    blocks: Tuple[np.ndarray, ...]
    v_n: np.ndarray
    d_n: np.ndarray


@dataclass(frozen=True)
class EffectEstimates:
    """Relative effects p (group-major, length a*d) with their covariance estimate"""
    rank_table: RankTable
    centered: Tuple[np.ndarray, ...]
    p_hat: np.ndarray
    covariance: CovarianceEstimate
    counts: CellCounts
    n: int
    notes: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class ContrastSpec:
    """Contrast matrix C, its projection T = C^T (C C^T)^+ C and a label"""
    matrix: np.ndarray
    projection: np.ndarray
    kind: HypothesisKind
    label: str
    rank: int


@dataclass(frozen=True)
class ReplicateStatistics:
    """
    Bootstrap statistics for a run of replicates, keyed by statistic name.

    degenerate[name] flags replicates whose statistic was undefined
    (zero trace or zero diagonal); their value is recorded as 0.
    """
    values: Dict[str, np.ndarray]
    degenerate: Dict[str, np.ndarray]

    @property
    def replicates(self) -> int:
        first = next(iter(self.values.values()))
        return int(first.shape[0])
