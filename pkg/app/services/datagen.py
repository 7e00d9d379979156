"""
Synthetic repeated-measures data.

Continuous responses come from a Gaussian copula: correlated normals are
mapped to uniforms with the normal CDF and then through the inverse CDF of
the chosen marginal. Ordinal responses use the uniform mixture
int(4 (c Z + Y) / (c + 1)) + 1 with Z shared within a subject.
"""

import logging
from typing import Sequence

import numpy as np
from scipy import stats

from ..core.constants import AR_RHO, CHISQ_MARGINAL_DOF, ORDINAL_CATEGORIES
from ..models.dataset import IncompleteDataset
from ..models.simulation import AlternativeKind, CovarianceKind, GeneratorSpec, Marginal
from ..utils.errors import DimensionMismatchError, NotPositiveDefiniteError

logger = logging.getLogger(__name__)

# Keeps the inverse CDFs finite when the normal CDF rounds to 0 or 1
_UNIFORM_CLIP = 1e-15

MARGINAL_LAWS = {
    Marginal.NORMAL: stats.norm(),
    Marginal.DOUBLE_EXPONENTIAL: stats.laplace(loc=0.0, scale=1.0),
    Marginal.LOGNORMAL: stats.lognorm(s=1.0),
    Marginal.CHISQ15: stats.chi2(df=CHISQ_MARGINAL_DOF),
}


def covariance_setting(kind: CovarianceKind, d: int, rho: float = AR_RHO) -> np.ndarray:
    """
    d x d dependence matrix.

    AR: rho^|l-j|; CS: I_d; TOEPLITZ: d - |l-j|
    """
    if d < 1:
        raise DimensionMismatchError("covariance setting needs d >= 1", expected=">= 1", actual=d)
    lags = np.abs(np.subtract.outer(np.arange(d), np.arange(d)))
    kind = CovarianceKind(kind)
    if kind == CovarianceKind.AR:
        return rho ** lags.astype(float)
    if kind == CovarianceKind.CS:
        return np.eye(d)
    return (d - lags).astype(float)


def to_correlation(covariance: np.ndarray) -> np.ndarray:
    scale = np.sqrt(np.diag(covariance))
    return covariance / np.outer(scale, scale)


def _cholesky(correlation: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(correlation)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"copula correlation is not positive definite: {e}") from e


def copula_sample(spec: GeneratorSpec, rng: np.random.Generator) -> IncompleteDataset:
    """
    Fully observed continuous data with the spec's marginal and dependence.

    Raises:
        NotPositiveDefiniteError: the correlation matrix has no Cholesky factor
    """
    if spec.marginal == Marginal.ORDINAL:
        raise ValueError("copula_sample draws continuous marginals; use ordinal_sample")
    factor = _cholesky(to_correlation(covariance_setting(spec.covariance, spec.d, spec.rho)))
    law = MARGINAL_LAWS[spec.marginal]
    shifts = spec.shift_matrix()

    values = []
    for i, size in enumerate(spec.group_sizes):
        normals = rng.standard_normal((size, spec.d)) @ factor.T
        uniforms = np.clip(stats.norm.cdf(normals), _UNIFORM_CLIP, 1.0 - _UNIFORM_CLIP)
        values.append(law.ppf(uniforms) + shifts[i])
    return IncompleteDataset(values=tuple(values), mask=tuple(np.ones(v.shape, dtype=bool) for v in values))


def ordinal_sample(
    c: float,
    a: int,
    d: int,
    group_sizes: Sequence[int],
    rng: np.random.Generator
) -> IncompleteDataset:
    """Scores in {1, ..., 4}; larger c means stronger within-subject association"""
    if len(group_sizes) != a:
        raise DimensionMismatchError("one group size per group", expected=a, actual=len(group_sizes))
    if c < 0:
        raise ValueError(f"ordinal association c must be non-negative, got {c}")

    values = []
    for size in group_sizes:
        subject = rng.random((size, 1))
        occasion = rng.random((size, d))
        scores = np.floor(ORDINAL_CATEGORIES * (c * subject + occasion) / (c + 1.0)) + 1.0
        values.append(scores)
    return IncompleteDataset(values=tuple(values), mask=tuple(np.ones(v.shape, dtype=bool) for v in values))


def shift_alternative(data: IncompleteDataset, group: int, mu: Sequence[float]) -> IncompleteDataset:
    """
    Add mu to the observed values of one group (0-based index).

    Raises:
        DimensionMismatchError: len(mu) != d or the group does not exist
    """
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (data.d,):
        raise DimensionMismatchError("shift vector must have length d", expected=data.d, actual=mu.shape)
    if not 0 <= group < data.a:
        raise DimensionMismatchError("shift targets a missing group", expected=f"0..{data.a - 1}", actual=group)
    values = list(data.values)
    values[group] = np.where(data.mask[group], values[group] + mu, 0.0)
    return data.with_values(values)


def alternative_shift(kind: AlternativeKind, d: int, zeta: float) -> np.ndarray:
    """ALT1: zeta on the second half of the occasions; ALT2: zeta on the last one"""
    mu = np.zeros(d)
    if AlternativeKind(kind) == AlternativeKind.ALT1:
        mu[d // 2:] = zeta
    else:
        mu[-1] = zeta
    return mu


def generate(spec: GeneratorSpec, rng: np.random.Generator) -> IncompleteDataset:
    """Fully observed dataset for a generator spec, group shifts included"""
    if spec.marginal != Marginal.ORDINAL:
        return copula_sample(spec, rng)

    data = ordinal_sample(spec.ordinal_c, spec.a, spec.d, spec.group_sizes, rng)
    shifts = spec.shift_matrix()
    for i in np.flatnonzero(np.any(shifts != 0.0, axis=1)):
        data = shift_alternative(data, int(i), shifts[i])
    return data
