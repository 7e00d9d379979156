"""
MCP Tools package for the rank-based repeated-measures test engine
"""

from .analysis_tools import describe_dataset, run_rank_tests
from .base import with_activity_logging, with_error_handling
from .simulation_tools import run_simulation

TOOLS = [run_rank_tests, describe_dataset, run_simulation]


def register_tools(mcp) -> int:
    """Register every tool on a FastMCP instance"""
    for tool in TOOLS:
        mcp.tool()(tool)
    return len(TOOLS)


__all__ = [
    "TOOLS",
    "register_tools",
    "run_rank_tests",
    "describe_dataset",
    "run_simulation",
    "with_error_handling",
    "with_activity_logging",
]
