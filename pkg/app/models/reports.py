"""
Test statistic and report schemas
"""

from enum import Enum
from typing import ClassVar, List, Optional

from pydantic import BaseModel, Field

from ..core.config import settings
from ..core.constants import REPORT_SCHEMA_VERSION
from .estimates import HypothesisKind


class StatisticKind(str, Enum):
    """Quadratic-form statistics"""
    WTS = "WTS"
    ATS = "ATS"
    MATS = "MATS"


ALL_STATISTICS = [StatisticKind.WTS, StatisticKind.ATS, StatisticKind.MATS]


class StatValue(BaseModel):
    """Observed statistic with its asymptotic reference where one exists"""
    kind: StatisticKind
    value: float = Field(..., ge=0.0)
    dof: Optional[float] = None
    p_asymptotic: Optional[float] = Field(None, ge=0.0, le=1.0)


class StatisticResult(BaseModel):
    """Observed statistic plus its wild bootstrap p-value"""
    statistic: StatValue
    p_bootstrap: Optional[float] = Field(None, ge=0.0, le=1.0)
    degenerate_replicates: int = 0


class BootstrapConfig(BaseModel):
    """Wild bootstrap settings"""
    replicates: int = Field(default_factory=lambda: settings.bootstrap_replicates, ge=1)
    seed: int = Field(default_factory=lambda: settings.seed, ge=0)
    statistics: List[StatisticKind] = Field(default_factory=lambda: list(ALL_STATISTICS), min_length=1)
    threads: int = Field(default_factory=lambda: settings.threads, ge=0)
    chunk_size: int = Field(default_factory=lambda: settings.bootstrap_chunk_size, ge=1)
    rtol: Optional[float] = Field(default_factory=lambda: settings.pinv_rtol)


class TestReport(BaseModel):
    """Results for one hypothesis"""
    __test__: ClassVar[bool] = False

    hypothesis: str
    kind: HypothesisKind
    contrast_rank: int
    statistics: List[StatisticResult]
    bootstrap_replicates: int
    seed: int
    warnings: List[str] = Field(default_factory=list)

    def result(self, kind: StatisticKind) -> Optional[StatisticResult]:
        for item in self.statistics:
            if item.statistic.kind == kind:
                return item
        return None


class DatasetSummary(BaseModel):
    """Design dimensions of an analyzed dataset"""
    groups: List[str]
    group_sizes: List[int]
    occasions: List[str]
    n_subjects: int
    n_observations: int
    observed_fraction: float


class AnalysisReport(BaseModel):
    """All hypotheses tested on one dataset (or one stratum of it)"""
    schema_version: str = REPORT_SCHEMA_VERSION
    stratum: Optional[str] = None
    dataset: DatasetSummary
    alpha: float
    hypotheses: List[TestReport]
