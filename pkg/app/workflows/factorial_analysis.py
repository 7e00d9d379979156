"""
Multi-hypothesis analysis of one factorial repeated-measures dataset
"""

import logging
from dataclasses import replace
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from ..core.config import settings
from ..models.dataset import IncompleteDataset
from ..models.estimates import ContrastSpec, HypothesisKind
from ..models.reports import AnalysisReport, BootstrapConfig, DatasetSummary
from ..services.contrasts import canonical_kinds, custom_contrast, hypothesis_matrix
from ..services.design import validate
from ..services.estimation import estimate_effects
from ..services.wild_bootstrap import bootstrap_pvalue
from ..utils.errors import InvalidDesignError

logger = logging.getLogger(__name__)

# A hypothesis request: a canonical kind, "all", or a ready contrast
HypothesisRequest = Union[str, HypothesisKind, ContrastSpec]

ALL_HYPOTHESES = "all"


def summarize(dataset: IncompleteDataset) -> DatasetSummary:
    cells = dataset.n * dataset.d
    return DatasetSummary(
        groups=list(dataset.group_labels),
        group_sizes=list(dataset.group_sizes),
        occasions=list(dataset.occasion_labels),
        n_subjects=dataset.n,
        n_observations=dataset.n_observations,
        observed_fraction=dataset.n_observations / cells,
    )


def resolve_hypotheses(requests: Sequence[HypothesisRequest], a: int, d: int) -> List[ContrastSpec]:
    """
    Turn requests into contrasts; "all" expands to every kind testable for (a, d).

    Raises:
        InvalidDesignError: a requested kind is not testable for the design
    """
    contrasts: List[ContrastSpec] = []
    for request in requests:
        if isinstance(request, ContrastSpec):
            contrasts.append(request)
            continue
        name = request.value if isinstance(request, HypothesisKind) else str(request).lower()
        if name == ALL_HYPOTHESES:
            contrasts.extend(hypothesis_matrix(a, d, kind) for kind in canonical_kinds(a, d))
        elif name in {k.value for k in HypothesisKind}:
            contrasts.append(hypothesis_matrix(a, d, HypothesisKind(name)))
        else:
            raise InvalidDesignError(f"unknown hypothesis '{request}'", kind=name, a=a, d=d)

    # canonical kinds collapse; every custom contrast is kept under a distinct label
    unique: Dict[str, ContrastSpec] = {}
    for contrast in contrasts:
        if contrast.kind != HypothesisKind.CUSTOM and any(c.kind == contrast.kind for c in unique.values()):
            continue
        label, copy = contrast.label, 1
        while label in unique:
            copy += 1
            label = f"{contrast.label} ({copy})"
        unique[label] = contrast if label == contrast.label else replace(contrast, label=label)
    return list(unique.values())


class FactorialAnalysis:
    """Runs the requested hypotheses on a dataset with shared bootstrap settings"""

    def __init__(self, config: Optional[BootstrapConfig] = None, alpha: Optional[float] = None):
        self.config = config or BootstrapConfig()
        self.alpha = settings.alpha if alpha is None else alpha

    def run(
        self,
        dataset: IncompleteDataset,
        hypotheses: Sequence[HypothesisRequest] = (ALL_HYPOTHESES,),
        stratum: Optional[str] = None
    ) -> AnalysisReport:
        """
        Test every hypothesis on the same ranks and covariance estimate.

        Raises:
            EmptyCellError: some cell has fewer than two observations
            InvalidDesignError: a hypothesis is not testable for the design
        """
        contrasts = resolve_hypotheses(hypotheses, dataset.a, dataset.d)
        validated = validate(dataset)
        estimates = estimate_effects(validated)
        logger.info(
            f"Testing {len(contrasts)} hypotheses on a={dataset.a}, d={dataset.d}, "
            f"n={dataset.n} (B={self.config.replicates}, seed={self.config.seed})"
        )

        reports = [
            bootstrap_pvalue(validated, contrast, self.config, estimates=estimates)
            for contrast in contrasts
        ]
        return AnalysisReport(
            stratum=stratum,
            dataset=summarize(dataset),
            alpha=self.alpha,
            hypotheses=reports,
        )

    def run_stratified(
        self,
        strata: Dict[str, IncompleteDataset],
        hypotheses: Sequence[HypothesisRequest] = (ALL_HYPOTHESES,)
    ) -> List[AnalysisReport]:
        """The same analysis separately for every stratum"""
        reports = []
        for level, dataset in strata.items():
            logger.info(f"Stratum '{level}'")
            reports.append(self.run(dataset, hypotheses, stratum=level))
        return reports


def custom_hypothesis(matrix: np.ndarray, dataset: IncompleteDataset, label: str = "Custom") -> ContrastSpec:
    return custom_contrast(matrix, dataset.a, dataset.d, label)
