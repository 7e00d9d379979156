"""
Monte Carlo simulation tool for the rank test MCP server
"""

import asyncio
import logging
from typing import Any, Dict, Optional

from ..io.reports import write_simulation
from ..services.mc_harness import load_config, simulate
from .base import with_activity_logging, with_error_handling

logger = logging.getLogger(__name__)


@with_activity_logging
@with_error_handling
async def run_simulation(config: Dict[str, Any], out_dir: Optional[str] = None) -> Dict[str, Any]:
    """
    Run a type-I error or power study and return the rejection-rate summary

    Args:
        config: Simulation config (generators, missingness, hypotheses, methods,
            nsim, bootstrap_replicates, alpha, seed and an optional alternative)
        out_dir: Optional directory for summary.csv, replications.csv and result.json

    Returns:
        Summary rows (one per cell, hypothesis and method) and failure counts
    """
    parsed = load_config(config)
    result = await asyncio.to_thread(simulate, parsed)

    response = {
        "success": True,
        "name": parsed.name,
        "cells": len(result.cells),
        "summary": [row.model_dump(mode="json") for row in result.summary],
        "failures": result.failures,
    }
    if out_dir:
        paths = await asyncio.to_thread(write_simulation, result, out_dir)
        response["files"] = {name: str(path) for name, path in paths.items()}
    return response
