"""
Missingness injectors.

Injectors only clear mask entries; observed values are never altered.
MAR mechanisms tie the missingness of a target occasion to the observed
value of a determining occasion of the same subject.
"""

import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..core.constants import (
    DEFAULT_MAR_PAIRS,
    MAR1_BAND_WIDTH,
    MAR1_MIDDLE_RATE,
    MAR1_TAIL_RATE,
    MAR2_LOWER_RATE,
    MAR2_UPPER_RATE,
)
from ..models.dataset import IncompleteDataset
from ..models.simulation import MissingMechanism, MissingnessSpec
from ..utils.errors import ConfigError, DimensionMismatchError

logger = logging.getLogger(__name__)


Pairs = Sequence[Tuple[int, int]]


def _check_pairs(pairs: Pairs, d: int):
    determining = {o for o, _ in pairs}
    targets = {m for _, m in pairs}
    for o, m in pairs:
        if not (1 <= o <= d and 1 <= m <= d):
            raise DimensionMismatchError(f"MAR pair ({o}, {m}) outside occasions 1..{d}", expected=d, actual=(o, m))
        if o == m:
            raise ConfigError(f"MAR pair ({o}, {m}) must reference two occasions", pointer="/pairs")
    if determining & targets:
        raise ConfigError(
            f"determining occasions {sorted(determining & targets)} are also targets", pointer="/pairs"
        )


def _mar1_rates(x: np.ndarray, seen: np.ndarray) -> np.ndarray:
    sigma = float(np.std(x[seen], ddof=1)) if seen.sum() > 1 else 0.0
    bound = MAR1_BAND_WIDTH * sigma
    outside = (x < -bound) | (x > bound)
    return np.where(outside, MAR1_TAIL_RATE, MAR1_MIDDLE_RATE)


def _mar2_rates(x: np.ndarray, seen: np.ndarray) -> np.ndarray:
    median = float(np.median(x[seen])) if seen.any() else 0.0
    return np.where(x <= median, MAR2_LOWER_RATE, MAR2_UPPER_RATE)


class MissingnessService:
    """MCAR and MAR deletion of entries from fully or partly observed datasets"""

    @staticmethod
    def default_mar_pairs(d: int) -> List[Tuple[int, int]]:
        """1-based (determining, target) pairs; consecutive disjoint pairs for unlisted d"""
        if d in DEFAULT_MAR_PAIRS:
            return list(DEFAULT_MAR_PAIRS[d])
        return [(j, j + 1) for j in range(1, d, 2)]

    @staticmethod
    def resolve_pairs(pairs: Optional[Pairs], d: int, pointer: str = "/pairs") -> List[Tuple[int, int]]:
        """
        Explicit pairs, or the defaults for d when pairs is None.

        Raises:
            ConfigError: d < 2, or an explicit empty pair list
        """
        if d < 2:
            raise ConfigError(f"MAR missingness needs at least two occasions, got d={d}", pointer=pointer)
        resolved = MissingnessService.default_mar_pairs(d) if pairs is None else [tuple(p) for p in pairs]
        if not resolved:
            raise ConfigError("MAR missingness needs at least one (determining, target) pair", pointer=pointer)
        _check_pairs(resolved, d)
        return resolved

    @staticmethod
    def inject_mcar(data: IncompleteDataset, r: float, rng: np.random.Generator) -> IncompleteDataset:
        """Every entry independently missing with probability r"""
        if not 0.0 <= r < 1.0:
            raise ValueError(f"missing rate must lie in [0, 1), got {r}")
        masks = [obs & ~(rng.random(obs.shape) < r) for obs in data.mask]
        return data.with_mask(masks)

    @staticmethod
    def inject_by_determining(
        data: IncompleteDataset,
        pairs: Optional[Pairs],
        rng: np.random.Generator,
        rates_for: Callable[[np.ndarray, np.ndarray], np.ndarray]
    ) -> IncompleteDataset:
        """Shared MAR loop; rates_for(x, observed) gives the per-subject missing probability"""
        pairs = MissingnessService.resolve_pairs(pairs, data.d)
        masks = []
        for vals, obs in zip(data.values, data.mask):
            new_mask = obs.copy()
            for o, m in pairs:
                x = vals[:, o - 1]
                seen = obs[:, o - 1]
                probability = rates_for(x, seen)
                dropped = seen & (rng.random(x.shape[0]) < probability)
                new_mask[:, m - 1] &= ~dropped
            masks.append(new_mask)
        return data.with_mask(masks)

    @staticmethod
    def inject_mar1(
        data: IncompleteDataset,
        pairs: Optional[Pairs],
        rng: np.random.Generator
    ) -> IncompleteDataset:
        """
        Two-sigma rule per group.

        Subjects with X_obs below -2 sigma or above 2 sigma lose X_miss with
        probability 15%, those within [-2 sigma, 2 sigma] with 30%. sigma is
        the standard deviation of the observed X_obs of the group.
        """
        return MissingnessService.inject_by_determining(data, pairs, rng, _mar1_rates)

    @staticmethod
    def inject_mar2(
        data: IncompleteDataset,
        pairs: Optional[Pairs],
        rng: np.random.Generator
    ) -> IncompleteDataset:
        """Median split per group: X_obs <= median loses X_miss w.p. 10%, above w.p. 30%"""
        return MissingnessService.inject_by_determining(data, pairs, rng, _mar2_rates)

    @staticmethod
    def apply(
        data: IncompleteDataset,
        spec: MissingnessSpec,
        rng: np.random.Generator
    ) -> IncompleteDataset:
        mechanism = MissingMechanism(spec.mechanism)
        if mechanism == MissingMechanism.MCAR:
            return MissingnessService.inject_mcar(data, spec.rate, rng)
        if mechanism == MissingMechanism.MAR1:
            return MissingnessService.inject_mar1(data, spec.pairs, rng)
        if mechanism == MissingMechanism.MAR2:
            return MissingnessService.inject_mar2(data, spec.pairs, rng)
        return data
