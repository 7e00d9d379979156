"""
Monte Carlo harness for type-I error and power studies.

A grid cell is one generator x missingness setting (x one zeta value for
power runs). Its seed is derived from the master seed and the cell's
effective settings, and every replication derives its own seed from the
cell seed, so cells and replications can run in any order or in parallel.
"""

import logging
import math
from collections import defaultdict
from typing import Any, Dict, List, Optional, Sequence

from joblib import Parallel, delayed
from pydantic import ValidationError

from ..models.estimates import ContrastSpec, HypothesisKind
from ..models.reports import BootstrapConfig, StatisticKind
from ..models.simulation import (
    Method,
    MissingMechanism,
    ReplicationRecord,
    SimulationCell,
    SimulationConfig,
    SimulationResult,
    SummaryRow,
)
from ..utils.errors import ConfigError, ErrorTally, RankTestError
from ..utils.seeding import derive_seed, stream
from .contrasts import hypothesis_matrix
from .datagen import alternative_shift, generate
from .design import validate
from .estimation import estimate_effects
from .missingness import MissingnessService
from .wild_bootstrap import bootstrap_pvalue, observed_statistics

logger = logging.getLogger(__name__)

METHOD_STATISTIC = {
    Method.WTS: StatisticKind.WTS,
    Method.ATS: StatisticKind.ATS,
    Method.WTS_BOOT: StatisticKind.WTS,
    Method.ATS_BOOT: StatisticKind.ATS,
    Method.MATS_BOOT: StatisticKind.MATS,
}


def load_config(payload: Dict[str, Any]) -> SimulationConfig:
    """
    Validate a JSON configuration document.

    Raises:
        ConfigError: the first invalid field, located by a JSON pointer
    """
    try:
        return SimulationConfig.model_validate(payload)
    except ValidationError as e:
        first = e.errors()[0]
        pointer = "/" + "/".join(str(part) for part in first["loc"])
        raise ConfigError(f"{pointer}: {first['msg']}", pointer=pointer) from e


def run_replication(
    cell: SimulationCell,
    contrasts: Dict[HypothesisKind, ContrastSpec],
    methods: Sequence[Method],
    bootstrap_replicates: int,
    replication: int
) -> List[ReplicationRecord]:
    """Generate, thin, test: one record per hypothesis"""
    seed = derive_seed(cell.seed, replication)
    data = generate(cell.generator, stream(seed, 0))
    data = MissingnessService.apply(data, cell.missingness, stream(seed, 1))

    try:
        estimates = estimate_effects(validate(data))
    except RankTestError as e:
        logger.debug(f"cell {cell.index} replication {replication} failed: {e.message}")
        return [
            ReplicationRecord(
                cell=cell.index, hypothesis=kind, replication=replication, seed=seed,
                failure=e.error_type.value
            )
            for kind in contrasts
        ]

    statistics = list(dict.fromkeys(METHOD_STATISTIC[m] for m in methods))
    bootstrapped = any(m.bootstrap for m in methods)
    config = BootstrapConfig(
        replicates=bootstrap_replicates,
        seed=derive_seed(seed, "bootstrap"),
        statistics=statistics,
        threads=1,
    )

    records = []
    for kind, contrast in contrasts.items():
        if bootstrapped:
            report = bootstrap_pvalue(data, contrast, config, estimates=estimates)
            results = {r.statistic.kind: r for r in report.statistics}
            observed = {k: r.statistic for k, r in results.items()}
        else:
            values, _ = observed_statistics(estimates, contrast, statistics, config.rtol)
            results = {}
            observed = {v.kind: v for v in values}

        p_values, degenerate = {}, {}
        for method in methods:
            kind_of = METHOD_STATISTIC[method]
            if method.bootstrap:
                p_values[method.value] = results[kind_of].p_bootstrap
                degenerate[method.value] = results[kind_of].degenerate_replicates
            else:
                p_values[method.value] = observed[kind_of].p_asymptotic
        records.append(ReplicationRecord(
            cell=cell.index, hypothesis=kind, replication=replication, seed=seed,
            p_values=p_values, degenerate=degenerate
        ))
    return records


def aggregate(
    records: Sequence[ReplicationRecord],
    cells: Sequence[SimulationCell],
    config: SimulationConfig
) -> List[SummaryRow]:
    """
    Long summary: one row per cell x hypothesis x method.

    Failed replications count as failures and leave the rate denominator.
    """
    grouped = defaultdict(list)
    for record in records:
        grouped[(record.cell, HypothesisKind(record.hypothesis))].append(record)

    rows = []
    for cell in cells:
        for kind in config.hypotheses:
            group = grouped.get((cell.index, kind), [])
            failures = sum(1 for r in group if r.failure is not None)
            for method in config.methods:
                p_values = [
                    r.p_values.get(method.value) for r in group if r.failure is None
                ]
                p_values = [p for p in p_values if p is not None]
                effective = len(p_values)
                rejections = sum(1 for p in p_values if p <= config.alpha)
                rate = rejections / effective if effective else None
                se = math.sqrt(rate * (1.0 - rate) / effective) if effective else None
                rows.append(SummaryRow(
                    **cell.describe(),
                    hypothesis=kind,
                    method=method,
                    label=method.label,
                    rejections=rejections,
                    nsim_effective=effective,
                    failures=failures,
                    rejection_rate=rate,
                    se=se,
                    degenerate_replicates=sum(r.degenerate.get(method.value, 0) for r in group),
                ))
    return rows


class MonteCarloHarness:
    """Plans the grid and runs every cell's replications"""

    def __init__(self, config: SimulationConfig):
        self.config = config

    def plan(self) -> List[SimulationCell]:
        """
        Expand the grid into cells with derived seeds.

        Raises:
            InvalidDesignError: a hypothesis is not testable for some generator
            ConfigError: the alternative targets a group that does not exist
            ConfigError: a MAR setting has no usable pairs for some generator
        """
        config = self.config
        zetas: List[Optional[float]] = list(config.alternative.zetas) if config.alternative else [None]
        cells = []
        for gi, generator in enumerate(config.generators):
            for kind in config.hypotheses:
                hypothesis_matrix(generator.a, generator.d, kind)
            if config.alternative and config.alternative.group > generator.a:
                raise ConfigError(
                    f"alternative group {config.alternative.group} exceeds a={generator.a}",
                    pointer="/alternative/group"
                )
            for mi, missingness in enumerate(config.missingness):
                if missingness.mechanism in (MissingMechanism.MAR1, MissingMechanism.MAR2):
                    MissingnessService.resolve_pairs(
                        missingness.pairs, generator.d, pointer=f"/missingness/{mi}/pairs"
                    )
                for zeta in zetas:
                    shifts = generator.shift_matrix()
                    if zeta is not None:
                        row = config.alternative.group - 1
                        shifts[row] += alternative_shift(config.alternative.kind, generator.d, zeta)
                    effective = generator.model_copy(update={"shifts": shifts.tolist()})
                    descriptor = {
                        "generator": effective.model_dump(mode="json"),
                        "missingness": missingness.model_dump(mode="json"),
                    }
                    cells.append(SimulationCell(
                        index=len(cells),
                        generator_index=gi,
                        missingness_index=mi,
                        zeta=zeta,
                        generator=effective,
                        missingness=missingness,
                        seed=derive_seed(config.seed, descriptor),
                    ))
        logger.info(f"Planned {len(cells)} cells for '{config.name}'")
        return cells

    def run_cell(self, cell: SimulationCell) -> List[ReplicationRecord]:
        config = self.config
        contrasts = {
            kind: hypothesis_matrix(cell.generator.a, cell.generator.d, kind)
            for kind in config.hypotheses
        }
        batches = Parallel(n_jobs=config.threads or -1)(
            delayed(run_replication)(cell, contrasts, config.methods, config.bootstrap_replicates, rep)
            for rep in range(config.nsim)
        )
        return [record for batch in batches for record in batch]

    def run(self) -> SimulationResult:
        cells = self.plan()
        records: List[ReplicationRecord] = []
        for cell in cells:
            logger.info(
                f"Cell {cell.index + 1}/{len(cells)}: {cell.describe()} (nsim={self.config.nsim})"
            )
            records.extend(self.run_cell(cell))

        tally = ErrorTally()
        for record in records:
            if record.failure is not None and record.hypothesis == self.config.hypotheses[0]:
                tally.record_type(record.failure)
        if tally.total():
            logger.warning(f"{tally.total()} replications failed: {tally.as_dict()}")

        return SimulationResult(
            config=self.config,
            cells=cells,
            summary=aggregate(records, cells, self.config),
            replications=records,
            failures=tally.as_dict(),
        )


def simulate_type1(config: SimulationConfig) -> SimulationResult:
    """
    Rejection rates under the null.

    Raises:
        ConfigError: the config carries a shift alternative or nonzero shifts
    """
    if config.alternative is not None:
        raise ConfigError("type-I runs take no alternative", pointer="/alternative")
    for gi, generator in enumerate(config.generators):
        if generator.shift_matrix().any():
            raise ConfigError("type-I runs need zero shifts", pointer=f"/generators/{gi}/shifts")
    return MonteCarloHarness(config).run()


def simulate_power(config: SimulationConfig) -> SimulationResult:
    """
    Rejection-rate curves over the alternative's zeta grid.

    Raises:
        ConfigError: no alternative configured
    """
    if config.alternative is None:
        raise ConfigError("power runs need an alternative", pointer="/alternative")
    return MonteCarloHarness(config).run()


def simulate(config: SimulationConfig) -> SimulationResult:
    """Dispatch on whether the config sweeps an alternative"""
    if config.alternative is None:
        return simulate_type1(config)
    return simulate_power(config)
