"""
Rank test MCP server using FastMCP 2.0

Exposes the nonparametric repeated-measures engine to assistants:
- run_rank_tests: WTS / ATS / MATS with wild bootstrap p-values on a CSV dataset
- describe_dataset: design dimensions, observed counts and testable hypotheses
- run_simulation: Monte Carlo type-I error and power studies
"""

import logging
import sys

from dotenv import load_dotenv
from fastmcp import FastMCP

from .core.config import settings
from .tools import register_tools

# Load environment variables
load_dotenv()

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.log_level.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)

# Create FastMCP server
mcp = FastMCP("Rank Repeated Measures Tests")
registered = register_tools(mcp)


def main():
    """Main entry point for FastMCP server"""
    try:
        logger.info("Rank repeated-measures test server with FastMCP 2.0")
        logger.info(f"Registered tools: {registered}")

        if settings.mcp_transport == "http":
            logger.info(f"HTTP Server: {settings.mcp_host}:{settings.port}")
            mcp.run(transport="http", host=settings.mcp_host, port=settings.port, path="/mcp")
        else:
            mcp.run()

    except Exception as e:
        logger.error(f"Error starting server: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
