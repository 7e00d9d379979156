"""
Dataset analysis tools for the rank test MCP server
"""

import asyncio
import logging
from typing import Any, Dict, List, Optional

from ..core.constants import MIN_CELL_COUNT
from ..io.datasets import TableFormat, TableSchema, read_dataset, read_strata
from ..io.reports import render_table
from ..models.reports import BootstrapConfig, StatisticKind
from ..services.contrasts import HYPOTHESIS_LABELS, canonical_kinds
from ..services.design import counts
from ..workflows.factorial_analysis import ALL_HYPOTHESES, FactorialAnalysis, summarize
from .base import with_activity_logging, with_error_handling

logger = logging.getLogger(__name__)


def _schema(
    format: str,
    group_column: str,
    subject_column: str,
    occasion_columns: Optional[List[str]],
    occasion_column: str,
    value_column: str,
    missing_token: Optional[str]
) -> TableSchema:
    schema = TableSchema(
        format=TableFormat(format.upper()),
        group_column=group_column,
        subject_column=subject_column,
        occasion_columns=occasion_columns,
        occasion_column=occasion_column,
        value_column=value_column,
    )
    if missing_token is not None:
        schema = schema.model_copy(update={"missing_token": missing_token})
    return schema


@with_activity_logging
@with_error_handling
async def run_rank_tests(
    csv_path: str,
    format: str = "WIDE",
    hypotheses: Optional[List[str]] = None,
    statistics: Optional[List[str]] = None,
    bootstrap_replicates: Optional[int] = None,
    seed: Optional[int] = None,
    alpha: Optional[float] = None,
    group_column: str = "group",
    subject_column: str = "subject",
    occasion_columns: Optional[List[str]] = None,
    occasion_column: str = "occasion",
    value_column: str = "value",
    missing_token: Optional[str] = None,
    stratify_by: Optional[str] = None
) -> Dict[str, Any]:
    """
    Run rank-based Wald-type, ANOVA-type and modified ANOVA-type tests with
    wild bootstrap p-values on a CSV dataset with missing values

    Args:
        csv_path: Path to the CSV table
        format: 'WIDE' (one row per subject) or 'LONG' (one row per subject and occasion)
        hypotheses: Any of 'group', 'time', 'interaction', 'all' (default 'all')
        statistics: Subset of 'WTS', 'ATS', 'MATS' (default all three)
        bootstrap_replicates: Number of bootstrap replicates B (default 999)
        seed: Bootstrap seed
        alpha: Significance level reported alongside the p-values
        stratify_by: Optional column; the analysis is repeated per level

    Returns:
        Analysis reports plus a rendered p-value table
    """
    schema = _schema(format, group_column, subject_column, occasion_columns,
                     occasion_column, value_column, missing_token)
    overrides = {
        "replicates": bootstrap_replicates,
        "seed": seed,
        "statistics": [StatisticKind(s.upper()) for s in statistics] if statistics else None,
    }
    config = BootstrapConfig(**{k: v for k, v in overrides.items() if v is not None})
    analysis = FactorialAnalysis(config, alpha=alpha)
    requested = hypotheses or [ALL_HYPOTHESES]

    def analyze():
        if stratify_by:
            return analysis.run_stratified(read_strata(csv_path, stratify_by, schema), requested)
        return [analysis.run(read_dataset(csv_path, schema), requested)]

    reports = await asyncio.to_thread(analyze)
    return {
        "success": True,
        "reports": [r.model_dump(mode="json") for r in reports],
        "table": render_table(reports),
    }


@with_activity_logging
@with_error_handling
async def describe_dataset(
    csv_path: str,
    format: str = "WIDE",
    group_column: str = "group",
    subject_column: str = "subject",
    occasion_columns: Optional[List[str]] = None,
    occasion_column: str = "occasion",
    value_column: str = "value",
    missing_token: Optional[str] = None
) -> Dict[str, Any]:
    """
    Summarize a repeated-measures CSV: design dimensions, observed counts per
    group and occasion, sparse cells and the testable hypotheses

    Args:
        csv_path: Path to the CSV table
        format: 'WIDE' or 'LONG'

    Returns:
        Design summary with per-cell observation counts
    """
    schema = _schema(format, group_column, subject_column, occasion_columns,
                     occasion_column, value_column, missing_token)
    dataset = await asyncio.to_thread(read_dataset, csv_path, schema)
    cell_counts = counts(dataset)

    observed = {
        group: {
            occasion: int(cell_counts.observed[i, j])
            for j, occasion in enumerate(dataset.occasion_labels)
        }
        for i, group in enumerate(dataset.group_labels)
    }
    sparse = [
        {"group": g, "occasion": o, "observed": c}
        for g, row in observed.items() for o, c in row.items() if c < MIN_CELL_COUNT
    ]
    return {
        "success": True,
        "summary": summarize(dataset).model_dump(mode="json"),
        "observed_counts": observed,
        "sparse_cells": sparse,
        "testable_hypotheses": [HYPOTHESIS_LABELS[k] for k in canonical_kinds(dataset.a, dataset.d)],
    }
