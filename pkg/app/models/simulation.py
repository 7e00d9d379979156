"""
Data generation, missingness and Monte Carlo configuration schemas
"""

from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.config import settings
from ..core.constants import AR_RHO, METHOD_LABELS, SIMULATION_SCHEMA_VERSION, ZETA_GRID
from .estimates import HypothesisKind


class Marginal(str, Enum):
    """Marginal laws of the generated responses"""
    NORMAL = "NORMAL"
    DOUBLE_EXPONENTIAL = "DOUBLE_EXPONENTIAL"
    LOGNORMAL = "LOGNORMAL"
    CHISQ15 = "CHISQ15"
    ORDINAL = "ORDINAL"


class CovarianceKind(str, Enum):
    """Cross-occasion dependence settings"""
    AR = "AR"
    CS = "CS"
    TOEPLITZ = "TOEPLITZ"


class MissingMechanism(str, Enum):
    NONE = "NONE"
    MCAR = "MCAR"
    MAR1 = "MAR1"
    MAR2 = "MAR2"


class AlternativeKind(str, Enum):
    """ALT1 shifts the second half of the occasions, ALT2 only the last one"""
    ALT1 = "ALT1"
    ALT2 = "ALT2"


class Method(str, Enum):
    """Test procedures compared by the harness"""
    WTS = "wts"
    ATS = "ats"
    WTS_BOOT = "wts_boot"
    ATS_BOOT = "ats_boot"
    MATS_BOOT = "mats_boot"

    @property
    def label(self) -> str:
        return METHOD_LABELS[self.value]

    @property
    def bootstrap(self) -> bool:
        return self.value.endswith("_boot")


class GeneratorSpec(BaseModel):
    """One data generating setting: marginal, dependence, group sizes, shifts"""
    model_config = ConfigDict(extra="forbid")

    marginal: Marginal = Marginal.NORMAL
    covariance: CovarianceKind = CovarianceKind.AR
    rho: float = Field(AR_RHO, gt=-1.0, lt=1.0)
    ordinal_c: float = Field(1.0, ge=0.0)
    group_sizes: List[int] = Field(..., min_length=1)
    d: int = Field(..., ge=1)
    shifts: Optional[List[List[float]]] = None

    @field_validator("group_sizes")
    @classmethod
    def validate_group_sizes(cls, v: List[int]) -> List[int]:
        if any(size < 1 for size in v):
            raise ValueError("every group needs at least one subject")
        return v

    @model_validator(mode="after")
    def validate_shifts(self) -> "GeneratorSpec":
        if self.shifts is not None:
            if len(self.shifts) != len(self.group_sizes) or any(len(s) != self.d for s in self.shifts):
                raise ValueError(f"shifts must be {len(self.group_sizes)} vectors of length {self.d}")
        return self

    @property
    def a(self) -> int:
        return len(self.group_sizes)

    def shift_matrix(self) -> np.ndarray:
        """(a, d) group shifts, zero when none are given"""
        if self.shifts is None:
            return np.zeros((self.a, self.d))
        return np.asarray(self.shifts, dtype=float)


class MissingnessSpec(BaseModel):
    """
    Missingness mechanism.

    pairs are 1-based (determining occasion, target occasion); when omitted
    the MAR injectors use the default pairs for d.
    """
    model_config = ConfigDict(extra="forbid")

    mechanism: MissingMechanism = MissingMechanism.NONE
    rate: float = Field(0.0, ge=0.0, lt=1.0)
    pairs: Optional[List[Tuple[int, int]]] = None

    @model_validator(mode="after")
    def validate_pairs(self) -> "MissingnessSpec":
        if self.pairs:
            determining = {o for o, _ in self.pairs}
            targets = {m for _, m in self.pairs}
            if any(o == m for o, m in self.pairs):
                raise ValueError("a pair must reference two distinct occasions")
            if determining & targets:
                raise ValueError("determining occasions cannot be made missing")
            if any(o < 1 or m < 1 for o, m in self.pairs):
                raise ValueError("occasions are numbered from 1")
        return self


class AlternativeSpec(BaseModel):
    """Shift alternative swept over a zeta grid; group is 1-based"""
    model_config = ConfigDict(extra="forbid")

    kind: AlternativeKind = AlternativeKind.ALT1
    group: int = Field(1, ge=1)
    zetas: List[float] = Field(default_factory=lambda: list(ZETA_GRID), min_length=1)


class SimulationConfig(BaseModel):
    """Grid of generator x missingness (x zeta) cells, each run nsim times"""
    model_config = ConfigDict(extra="forbid")

    name: str = "simulation"
    generators: List[GeneratorSpec] = Field(..., min_length=1)
    missingness: List[MissingnessSpec] = Field(default_factory=lambda: [MissingnessSpec()], min_length=1)
    hypotheses: List[HypothesisKind] = Field(default_factory=lambda: [HypothesisKind.INTERACTION], min_length=1)
    methods: List[Method] = Field(default_factory=lambda: list(Method), min_length=1)
    alternative: Optional[AlternativeSpec] = None
    nsim: int = Field(default_factory=lambda: settings.sim_nsim, ge=1)
    bootstrap_replicates: int = Field(default_factory=lambda: settings.sim_bootstrap_replicates, ge=1)
    alpha: float = Field(default_factory=lambda: settings.alpha, gt=0.0, lt=1.0)
    seed: int = Field(default_factory=lambda: settings.seed, ge=0)
    threads: int = Field(default_factory=lambda: settings.threads, ge=0)

    @field_validator("hypotheses")
    @classmethod
    def validate_hypotheses(cls, v: List[HypothesisKind]) -> List[HypothesisKind]:
        if HypothesisKind.CUSTOM in v:
            raise ValueError("simulations run canonical hypotheses only")
        return v


class SimulationCell(BaseModel):
    """One grid cell with its effective shifts and derived seed"""
    index: int
    generator_index: int
    missingness_index: int
    zeta: Optional[float] = None
    generator: GeneratorSpec
    missingness: MissingnessSpec
    seed: int

    def describe(self) -> Dict[str, Any]:
        """Flat setting columns for tabular output"""
        return {
            "cell": self.index,
            "marginal": self.generator.marginal.value,
            "covariance": self.generator.covariance.value,
            "group_sizes": "/".join(str(s) for s in self.generator.group_sizes),
            "d": self.generator.d,
            "mechanism": self.missingness.mechanism.value,
            "missing_rate": self.missingness.rate,
            "zeta": self.zeta,
        }


class ReplicationRecord(BaseModel):
    """Per-method p-values of one hypothesis in one replication"""
    cell: int
    hypothesis: HypothesisKind
    replication: int
    seed: int
    failure: Optional[str] = None
    p_values: Dict[str, Optional[float]] = Field(default_factory=dict)
    degenerate: Dict[str, int] = Field(default_factory=dict)


class SummaryRow(BaseModel):
    """Rejection rate of one method for one cell and hypothesis"""
    cell: int
    marginal: str
    covariance: str
    group_sizes: str
    d: int
    mechanism: str
    missing_rate: float
    zeta: Optional[float] = None
    hypothesis: HypothesisKind
    method: Method
    label: str
    rejections: int
    nsim_effective: int
    failures: int
    rejection_rate: Optional[float] = None
    se: Optional[float] = None
    degenerate_replicates: int = 0


class SimulationResult(BaseModel):
    """Everything a simulation run produced"""
    schema_version: str = SIMULATION_SCHEMA_VERSION
    config: SimulationConfig
    cells: List[SimulationCell]
    summary: List[SummaryRow]
    replications: List[ReplicationRecord]
    failures: Dict[str, int] = Field(default_factory=dict)
