"""
Report emission: JSON documents, p-value tables and simulation result files
"""

import logging
from pathlib import Path
from typing import Dict, List, Sequence, Union

import pandas as pd
from pydantic import TypeAdapter

from ..core.constants import METHOD_LABELS, TABLE_DECIMALS
from ..models.reports import AnalysisReport, StatisticKind
from ..models.simulation import SimulationResult

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_REPORTS = TypeAdapter(List[AnalysisReport])

# (column label, statistic, bootstrap?) in display order
_PVALUE_COLUMNS = [
    (METHOD_LABELS["wts"], StatisticKind.WTS, False),
    (METHOD_LABELS["ats"], StatisticKind.ATS, False),
    (METHOD_LABELS["wts_boot"], StatisticKind.WTS, True),
    (METHOD_LABELS["ats_boot"], StatisticKind.ATS, True),
    (METHOD_LABELS["mats_boot"], StatisticKind.MATS, True),
]


def render_json(reports: Sequence[AnalysisReport]) -> str:
    """One report as an object, stratified reports as an array"""
    if len(reports) == 1:
        return reports[0].model_dump_json(indent=2)
    return _REPORTS.dump_json(list(reports), indent=2).decode()


def pvalue_table(report: AnalysisReport) -> pd.DataFrame:
    """Rows are hypotheses, columns the asymptotic and bootstrap p-values"""
    rows: Dict[str, Dict[str, float]] = {}
    for test in report.hypotheses:
        row = {}
        for label, kind, bootstrap in _PVALUE_COLUMNS:
            result = test.result(kind)
            if result is None:
                continue
            value = result.p_bootstrap if bootstrap else result.statistic.p_asymptotic
            if value is not None:
                row[label] = value
        rows[test.hypothesis] = row
    columns = [label for label, _, _ in _PVALUE_COLUMNS if any(label in r for r in rows.values())]
    return pd.DataFrame.from_dict(rows, orient="index", columns=columns)


def render_table(reports: Sequence[AnalysisReport]) -> str:
    blocks = []
    for report in reports:
        table = pvalue_table(report).round(TABLE_DECIMALS)
        text = table.to_string(float_format=lambda v: f"{v:.{TABLE_DECIMALS}f}")
        if report.stratum is not None:
            text = f"[{report.stratum}]\n{text}"
        blocks.append(text)
    return "\n\n".join(blocks)


def replication_frame(result: SimulationResult) -> pd.DataFrame:
    """Per-replication log with one p_<method> and degenerate_<method> column per method"""
    methods = [m.value for m in result.config.methods]
    rows = []
    for record in result.replications:
        row = {
            "cell": record.cell,
            "hypothesis": record.hypothesis.value,
            "replication": record.replication,
            "seed": record.seed,
            "failure": record.failure,
        }
        for method in methods:
            row[f"p_{method}"] = record.p_values.get(method)
            row[f"degenerate_{method}"] = record.degenerate.get(method)
        rows.append(row)
    return pd.DataFrame(rows)


def summary_frame(result: SimulationResult) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump(mode="json") for row in result.summary])


def write_simulation(result: SimulationResult, out_dir: PathLike) -> Dict[str, Path]:
    """summary.csv, replications.csv and result.json under out_dir"""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "summary": out / "summary.csv",
        "replications": out / "replications.csv",
        "result": out / "result.json",
    }
    summary_frame(result).to_csv(paths["summary"], index=False)
    replication_frame(result).to_csv(paths["replications"], index=False)
    paths["result"].write_text(result.model_dump_json(indent=2))
    logger.info(f"Wrote simulation results to {out}")
    return paths


def read_simulation(path: PathLike) -> SimulationResult:
    return SimulationResult.model_validate_json(Path(path).read_text())
