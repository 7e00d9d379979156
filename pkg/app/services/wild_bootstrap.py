"""
Wild bootstrap calibration of the rank statistics.

Each replicate multiplies every subject's centered rank vector by one
Rademacher sign and recomputes effects, covariance and statistics from
the signed scores. Replicate b draws its signs from stream(seed, b), and
replicates are evaluated in fixed-size chunks, so the p-values do not
depend on how many workers run the chunks.
"""

import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from ..models.dataset import CellCounts, IncompleteDataset, ValidatedDataset
from ..models.estimates import ContrastSpec, CovarianceEstimate, EffectEstimates, ReplicateStatistics
from ..models.reports import BootstrapConfig, StatisticKind, StatisticResult, StatValue, TestReport
from ..utils.errors import DegenerateTraceError, ZeroDiagonalError
from ..utils.seeding import stream
from .covariance import assemble, group_covariance
from .design import ensure_validated
from .estimation import estimate_effects
from .statistics import ats, ats_values, mats, mats_values, wts, wts_values

logger = logging.getLogger(__name__)

Weights = Tuple[np.ndarray, ...]


def draw_weights(group_sizes: Sequence[int], rng: np.random.Generator) -> Weights:
    """One Rademacher sign per subject, split by group"""
    signs = rng.integers(0, 2, size=int(sum(group_sizes))) * 2.0 - 1.0
    return tuple(np.split(signs, np.cumsum(group_sizes)[:-1]))


def replicate_weights(group_sizes: Sequence[int], seed: int, start: int, stop: int) -> Weights:
    """Signs for replicates start..stop-1 stacked as (B, n_i) per group"""
    draws = [draw_weights(group_sizes, stream(seed, b)) for b in range(start, stop)]
    return tuple(np.stack([w[i] for w in draws]) for i in range(len(group_sizes)))


def bootstrap_effects(
    centered: Sequence[np.ndarray],
    mask: Sequence[np.ndarray],
    counts: CellCounts,
    weights: Weights
) -> np.ndarray:
    """
    p*_ij = sum_k W_ik Z_ijk / (lambda_ij. N) over observed entries.

    weights[i] has shape (n_i,) or (B, n_i); the result is (a*d,) or (B, a*d).
    """
    parts = []
    for i, (z, obs) in enumerate(zip(centered, mask)):
        signed = np.einsum("...k,kj->...j", weights[i], np.where(obs, z, 0.0))
        parts.append(signed / (counts.observed[i] * float(counts.N)))
    return np.concatenate(parts, axis=-1)


def bootstrap_covariance(
    centered: Sequence[np.ndarray],
    mask: Sequence[np.ndarray],
    counts: CellCounts,
    weights: Weights
) -> CovarianceEstimate:
    """V_n* and D_n* from the signed scores Z* = W Z (batch aware)"""
    blocks = [
        group_covariance(weights[i][..., :, None] * centered[i], mask[i], counts, i)
        for i in range(len(centered))
    ]
    return assemble(blocks, counts)


def bootstrap_statistics(
    p_star: np.ndarray,
    covariance: CovarianceEstimate,
    contrast: ContrastSpec,
    n: int,
    statistics: Sequence[StatisticKind] = tuple(StatisticKind),
    rtol: Optional[float] = None
) -> ReplicateStatistics:
    """
    Starred statistics through the same kernels as the observed ones.

    Undefined replicates (zero trace for ATS, zero diagonal for MATS) are
    flagged and recorded as 0.
    """
    p_star = np.asarray(p_star, dtype=float)
    v_n, d_n = covariance.v_n, covariance.d_n
    if p_star.ndim == 1:
        p_star, v_n, d_n = p_star[None, :], v_n[None, ...], d_n[None, ...]

    values, degenerate = {}, {}
    for kind in statistics:
        kind = StatisticKind(kind)
        if kind == StatisticKind.WTS:
            t = wts_values(p_star, v_n, contrast.matrix, n, rtol)
            bad = np.zeros(t.shape, dtype=bool)
        elif kind == StatisticKind.ATS:
            t, traces, _ = ats_values(p_star, v_n, contrast.projection, n)
            bad = traces <= 0.0
        else:
            t, bad = mats_values(p_star, d_n, contrast.matrix, n, rtol)
        values[kind.value] = t
        degenerate[kind.value] = bad
    return ReplicateStatistics(values=values, degenerate=degenerate)


def _run_chunk(
    estimates: EffectEstimates,
    contrast: ContrastSpec,
    statistics: Sequence[StatisticKind],
    seed: int,
    start: int,
    stop: int,
    rtol: Optional[float]
) -> ReplicateStatistics:
    table = estimates.rank_table
    counts = estimates.counts
    weights = replicate_weights(counts.group_sizes, seed, start, stop)
    p_star = bootstrap_effects(estimates.centered, table.mask, counts, weights)
    covariance = bootstrap_covariance(estimates.centered, table.mask, counts, weights)
    return bootstrap_statistics(p_star, covariance, contrast, estimates.n, statistics, rtol)


def replicate_statistics(
    estimates: EffectEstimates,
    contrast: ContrastSpec,
    config: BootstrapConfig
) -> ReplicateStatistics:
    """All B replicates, chunked and optionally run in parallel"""
    bounds = [
        (start, min(start + config.chunk_size, config.replicates))
        for start in range(0, config.replicates, config.chunk_size)
    ]
    n_jobs = config.threads or -1
    if len(bounds) == 1:
        n_jobs = 1

    chunks: List[ReplicateStatistics] = Parallel(n_jobs=n_jobs)(
        delayed(_run_chunk)(estimates, contrast, config.statistics, config.seed, start, stop, config.rtol)
        for start, stop in bounds
    )
    names = chunks[0].values.keys()
    return ReplicateStatistics(
        values={k: np.concatenate([c.values[k] for c in chunks]) for k in names},
        degenerate={k: np.concatenate([c.degenerate[k] for c in chunks]) for k in names},
    )


def pvalue_from_replicates(starred: np.ndarray, observed: float) -> float:
    """#{b : T*_b >= T} / B"""
    starred = np.asarray(starred, dtype=float)
    return int(np.count_nonzero(starred >= observed)) / starred.size


def observed_statistic(
    estimates: EffectEstimates,
    contrast: ContrastSpec,
    kind: StatisticKind,
    rtol: Optional[float] = None
) -> StatValue:
    """
    Observed statistic for one kind.

    Raises:
        DegenerateTraceError: ATS with tr(T V_n) <= 0
        ZeroDiagonalError: MATS with a zero diagonal entry in D_n
    """
    covariance = estimates.covariance
    kind = StatisticKind(kind)
    if kind == StatisticKind.WTS:
        return wts(estimates.p_hat, covariance.v_n, contrast.matrix, estimates.n, rtol)
    if kind == StatisticKind.ATS:
        return ats(estimates.p_hat, covariance.v_n, contrast.projection, estimates.n)
    return mats(estimates.p_hat, covariance.d_n, contrast.matrix, estimates.n, rtol)


def observed_statistics(
    estimates: EffectEstimates,
    contrast: ContrastSpec,
    statistics: Sequence[StatisticKind],
    rtol: Optional[float] = None
) -> Tuple[List[StatValue], List[str]]:
    """Observed statistics with undefined ones reported as 0 (p = 1) plus a warning"""
    results, warnings = [], []
    for kind in statistics:
        kind = StatisticKind(kind)
        try:
            results.append(observed_statistic(estimates, contrast, kind, rtol))
        except (DegenerateTraceError, ZeroDiagonalError) as e:
            logger.warning(f"{contrast.label}: {kind.value} undefined ({e.message}); reported as 0")
            warnings.append(f"{kind.value}: {e.message}; statistic reported as 0")
            p_asymptotic = None if kind == StatisticKind.MATS else 1.0
            results.append(StatValue(kind=kind, value=0.0, p_asymptotic=p_asymptotic))
    return results, warnings


def bootstrap_pvalue(
    dataset: Union[IncompleteDataset, ValidatedDataset],
    contrast: ContrastSpec,
    config: Optional[BootstrapConfig] = None,
    estimates: Optional[EffectEstimates] = None
) -> TestReport:
    """
    Observed statistics and wild bootstrap p-values p = #{b : T*_b >= T} / B.

    Args:
        dataset: raw or validated data
        contrast: hypothesis contrast
        config: bootstrap settings; defaults from the environment
        estimates: precomputed effect estimates for the dataset, reused across hypotheses

    Raises:
        EmptyCellError: a cell has fewer than two observations
    """
    config = config or BootstrapConfig()
    if estimates is None:
        estimates = estimate_effects(ensure_validated(dataset))

    observed, warnings = observed_statistics(estimates, contrast, config.statistics, config.rtol)
    warnings = list(estimates.notes) + warnings
    replicates = replicate_statistics(estimates, contrast, config)

    results = []
    for stat in observed:
        name = stat.kind.value
        starred = replicates.values[name]
        degenerate = int(replicates.degenerate[name].sum())
        if degenerate:
            logger.warning(f"{contrast.label}: {degenerate} of {config.replicates} {name} replicates degenerate")
            warnings.append(f"{name}: {degenerate} degenerate bootstrap replicates counted as 0")
        results.append(StatisticResult(
            statistic=stat,
            p_bootstrap=pvalue_from_replicates(starred, stat.value),
            degenerate_replicates=degenerate,
        ))

    logger.debug(f"{contrast.label}: bootstrap with B={config.replicates}, seed={config.seed} done")
    return TestReport(
        hypothesis=contrast.label,
        kind=contrast.kind,
        contrast_rank=contrast.rank,
        statistics=results,
        bootstrap_replicates=config.replicates,
        seed=config.seed,
        warnings=warnings,
    )
