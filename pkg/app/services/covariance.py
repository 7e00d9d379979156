"""
Masked rank-based covariance estimation.

The estimators take per-group score arrays (n_i, d): the mid-ranks R for
the observed data, or the wild-bootstrap scores Z* = W Z for a replicate.
The same code path serves both; array arguments may carry a leading batch
axis (B, n_i, d) so replicates are evaluated together.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from ..models.dataset import CellCounts
from ..models.estimates import CovarianceEstimate
from ..utils.numerics import symmetrize

logger = logging.getLogger(__name__)


def _masked_mean(scores: np.ndarray, obs: np.ndarray, lam: np.ndarray) -> np.ndarray:
    return np.where(obs, scores, 0.0).sum(axis=-2) / lam


def vhat_diag(
    scores: Sequence[np.ndarray],
    mask: Sequence[np.ndarray],
    counts: CellCounts,
    i: int,
    j: int
) -> float:
    """n_i * sum_k lambda_ijk (S_ijk - S_ij.)^2 / (N^2 lambda_ij. (lambda_ij. - 1))"""
    obs = mask[i][:, j]
    cell = scores[i][obs, j]
    lam = int(counts.observed[i, j])
    deviations = cell - cell.mean()
    numerator = counts.group_sizes[i] * float(np.sum(deviations ** 2))
    return numerator / (counts.N ** 2 * lam * (lam - 1))


def vhat_offdiag(
    scores: Sequence[np.ndarray],
    mask: Sequence[np.ndarray],
    counts: CellCounts,
    i: int,
    j: int,
    j_prime: int,
    notes: Optional[List[str]] = None
) -> float:
    """
    Cross-occasion entry; the sum runs over subjects observed at both j and j'.

    A non-positive denominator (lambda_ij. - 1)(lambda_ij'. - 1) + Delta - 1
    yields 0.0 and a note.
    """
    lam_j = int(counts.observed[i, j])
    lam_jp = int(counts.observed[i, j_prime])
    both = int(counts.pairwise[i, j, j_prime])
    denominator = (lam_j - 1) * (lam_jp - 1) + both - 1
    if denominator <= 0:
        if notes is not None:
            notes.append(
                f"degenerate covariance denominator in group {i + 1} "
                f"at occasions ({j + 1}, {j_prime + 1}); entry set to 0"
            )
        return 0.0

    obs_j = mask[i][:, j]
    obs_jp = mask[i][:, j_prime]
    mean_j = scores[i][obs_j, j].mean()
    mean_jp = scores[i][obs_jp, j_prime].mean()
    paired = obs_j & obs_jp
    products = (scores[i][paired, j] - mean_j) * (scores[i][paired, j_prime] - mean_jp)
    numerator = counts.group_sizes[i] * float(np.sum(products))
    return numerator / (counts.N ** 2 * denominator)


def denominators(counts: CellCounts, i: int) -> np.ndarray:
    """d x d matrix of the diagonal and off-diagonal denominators, without the N^2 factor"""
    lam = counts.observed[i].astype(float)
    both = counts.pairwise[i].astype(float)
    denom = np.outer(lam - 1.0, lam - 1.0) + both - 1.0
    np.fill_diagonal(denom, lam * (lam - 1.0))
    return denom


def group_covariance(
    scores: np.ndarray,
    obs: np.ndarray,
    counts: CellCounts,
    i: int,
    notes: Optional[List[str]] = None
) -> np.ndarray:
    """
    V_i for one group, vectorized over entries (and over a leading batch axis).

    Args:
        scores: (..., n_i, d) scores of group i
        obs: (n_i, d) observation mask of group i
        counts: design counts
        i: group index
        notes: collects degenerate-denominator messages

    Returns:
        (..., d, d) exactly symmetric block
    """
    lam = counts.observed[i].astype(float)
    deviations = np.where(obs, scores - _masked_mean(scores, obs, lam)[..., None, :], 0.0)
    cross = np.einsum("...kj,...kl->...jl", deviations, deviations)

    denom = denominators(counts, i)
    degenerate = denom <= 0.0
    if degenerate.any() and notes is not None:
        for j, jp in np.argwhere(np.triu(degenerate, 1)):
            notes.append(
                f"degenerate covariance denominator in group {i + 1} "
                f"at occasions ({j + 1}, {jp + 1}); entry set to 0"
            )

    scale = counts.group_sizes[i] / float(counts.N) ** 2
    block = np.where(degenerate, 0.0, scale * cross / np.where(degenerate, 1.0, denom))
    return symmetrize(block)


def assemble(blocks: Sequence[np.ndarray], counts: CellCounts) -> CovarianceEstimate:
    """
    V_n = (+)_i (n / n_i) V_i, block-diagonal, plus D_n = diag(V_n).

    Blocks may carry a common leading batch axis.
    """
    d = blocks[0].shape[-1]
    a = len(blocks)
    batch_shape = blocks[0].shape[:-2]
    v_n = np.zeros(batch_shape + (a * d, a * d))
    for i, block in enumerate(blocks):
        weight = counts.n / counts.group_sizes[i]
        v_n[..., i * d:(i + 1) * d, i * d:(i + 1) * d] = weight * block
    diagonal = np.diagonal(v_n, axis1=-2, axis2=-1)
    d_n = np.zeros_like(v_n)
    idx = np.arange(a * d)
    d_n[..., idx, idx] = diagonal
    return CovarianceEstimate(blocks=tuple(blocks), v_n=v_n, d_n=d_n)


def estimate_covariance(
    scores: Sequence[np.ndarray],
    mask: Sequence[np.ndarray],
    counts: CellCounts,
    notes: Optional[List[str]] = None
) -> CovarianceEstimate:
    """Covariance estimate for per-group score arrays (ranks or bootstrap scores)"""
    blocks = [
        group_covariance(scores[i], mask[i], counts, i, notes)
        for i in range(len(scores))
    ]
    return assemble(blocks, counts)
