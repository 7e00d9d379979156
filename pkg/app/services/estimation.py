"""
Effect and covariance estimation for a validated dataset
"""

import logging

from ..models.dataset import ValidatedDataset
from ..models.estimates import EffectEstimates
from .covariance import estimate_covariance
from .ranking import centered_ranks, relative_effects

logger = logging.getLogger(__name__)


def estimate_effects(validated: ValidatedDataset) -> EffectEstimates:
    """Ranks, relative effects, centered ranks and V_n / D_n in one pass"""
    table, p_hat = relative_effects(validated)
    notes = list(validated.notes)
    covariance = estimate_covariance(table.ranks, table.mask, validated.counts, notes)
    for note in notes:
        logger.debug(note)
    return EffectEstimates(
        rank_table=table,
        centered=centered_ranks(table),
        p_hat=p_hat,
        covariance=covariance,
        counts=validated.counts,
        n=validated.counts.n,
        notes=notes,
    )
