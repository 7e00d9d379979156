"""
Pooled mid-ranks and relative marginal effects
"""

import logging
from typing import Tuple

import numpy as np
from scipy import stats

from ..models.dataset import ValidatedDataset
from ..models.estimates import RankTable

logger = logging.getLogger(__name__)


def midranks(pooled: np.ndarray) -> np.ndarray:
    """
    Mid-ranks of a pooled sample.

    Ties (exact equality of the given reals) share the average of the
    integer ranks they span, i.e. rank(x) = 1/2 + sum_y c(x - y) with the
    normalized counting function c.
    """
    pooled = np.asarray(pooled, dtype=float)
    if pooled.size == 0:
        raise ValueError("midranks needs at least one value")
    return stats.rankdata(pooled, method="average")


def relative_effects(validated: ValidatedDataset) -> Tuple[RankTable, np.ndarray]:
    """
    Rank all N observed values together and estimate p_ij = (R_ij. - 1/2) / N.

    Returns:
        The rank table and the effect vector ordered group-major, then occasion
    """
    dataset = validated.dataset
    counts = validated.counts
    pooled_ranks = midranks(dataset.pooled_observed())

    ranks = []
    offset = 0
    for vals, obs in zip(dataset.values, dataset.mask):
        group_ranks = np.zeros_like(vals)
        size = int(obs.sum())
        group_ranks[obs] = pooled_ranks[offset:offset + size]
        offset += size
        group_ranks.setflags(write=False)
        ranks.append(group_ranks)

    cell_means = np.vstack([r.sum(axis=0) for r in ranks]) / counts.observed
    p_hat = ((cell_means - 0.5) / counts.N).reshape(-1)

    table = RankTable(ranks=tuple(ranks), mask=dataset.mask, cell_means=cell_means, N=counts.N)
    return table, p_hat


def centered_ranks(table: RankTable) -> Tuple[np.ndarray, ...]:
    """Z_ijk = R_ijk - R_ij. on observed entries, 0.0 elsewhere"""
    centered = []
    for i, (ranks, obs) in enumerate(zip(table.ranks, table.mask)):
        z = np.where(obs, ranks - table.cell_means[i], 0.0)
        z.setflags(write=False)
        centered.append(z)
    return tuple(centered)
