"""
Configuration management for the rank-based repeated-measures test engine
"""

from typing import Optional

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables
load_dotenv()


class Settings(BaseSettings):
    """Application settings with environment variable support"""

    model_config = SettingsConfigDict(
        env_prefix="RANKTEST_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Bootstrap defaults
    bootstrap_replicates: int = Field(999, ge=1)
    seed: int = Field(20190601, ge=0)
    alpha: float = Field(0.05, gt=0.0, lt=1.0)
    bootstrap_chunk_size: int = Field(64, ge=1)

    # Parallelism (0 = all cores)
    threads: int = Field(0, ge=0)

    # Linear algebra
    pinv_rtol: Optional[float] = Field(None, gt=0.0)

    # Ingestion
    missing_token: str = "NA"

    # Monte Carlo desk-scale defaults
    sim_nsim: int = Field(2000, ge=1)
    sim_bootstrap_replicates: int = Field(499, ge=1)

    # Logging
    log_level: str = "INFO"

    # MCP server
    mcp_transport: str = "stdio"
    mcp_host: str = "0.0.0.0"
    port: int = Field(8000, ge=1)


# Global settings instance
settings = Settings()
