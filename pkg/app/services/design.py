"""
Design bookkeeping: observation counts and dataset validation
"""

import logging

import numpy as np

from ..core.constants import ERROR_EMPTY_CELL, MIN_CELL_COUNT
from ..models.dataset import CellCounts, IncompleteDataset, ValidatedDataset
from ..utils.errors import EmptyCellError

logger = logging.getLogger(__name__)


def counts(dataset: IncompleteDataset) -> CellCounts:
    """
    Count observed entries per cell and per occasion pair.

    lambda_ij. is the column sum of group i's mask; Delta_i,jj' is the
    Gram matrix of the mask, so Delta_i,jj = lambda_ij. by construction.
    """
    observed = np.zeros((dataset.a, dataset.d), dtype=np.int64)
    pairwise = np.zeros((dataset.a, dataset.d, dataset.d), dtype=np.int64)
    for i, obs in enumerate(dataset.mask):
        indicator = obs.astype(np.int64)
        observed[i] = indicator.sum(axis=0)
        pairwise[i] = indicator.T @ indicator
    return CellCounts(
        observed=observed,
        pairwise=pairwise,
        group_sizes=dataset.group_sizes,
        n=dataset.n,
        N=int(observed.sum()),
    )


def validate(dataset: IncompleteDataset) -> ValidatedDataset:
    """
    Check that every cell supports variance estimation.

    Raises:
        EmptyCellError: some lambda_ij. < 2
    """
    cell_counts = counts(dataset)
    sparse = np.argwhere(cell_counts.observed < MIN_CELL_COUNT)
    if sparse.size:
        cells = [
            (dataset.group_labels[i], dataset.occasion_labels[j], int(cell_counts.observed[i, j]))
            for i, j in sparse
        ]
        raise EmptyCellError(ERROR_EMPTY_CELL.format(minimum=MIN_CELL_COUNT, cells=cells), cells)

    logger.debug(
        f"Validated design a={dataset.a}, d={dataset.d}, n={cell_counts.n}, N={cell_counts.N}"
    )
    return ValidatedDataset(dataset=dataset, counts=cell_counts)


def ensure_validated(data) -> ValidatedDataset:
    """Accept either a raw or an already validated dataset"""
    if isinstance(data, ValidatedDataset):
        return data
    return validate(data)
