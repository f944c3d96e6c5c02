"""
Configuration module for the cascade toolkit.
Loads settings from environment variables (prefix CASCADE_) with defaults.
"""

from typing import Dict, Tuple

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="CASCADE_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Environment
    environment: str = Field(default="development")
    log_level: str = Field(default="INFO")
    log_dir: str = Field(default="logs", description="Empty string disables file logging")

    # Parallelism (CASCADE_THREADS, overridden by --threads)
    threads: int = Field(default=0, ge=0, description="0 means one worker per physical core")

    # Simulation defaults
    default_seed: int = Field(default=20090201, ge=0, lt=2**64)
    n_max: int = Field(default=14, ge=1)
    m_sub: int = Field(default=8, ge=1)
    m_cells: int = Field(default=8, ge=1)
    replicas: int = Field(default=10_000, ge=1)

    # Convergence criterion
    p_grid_size: int = Field(default=64, ge=4)
    confidence_sigmas: float = Field(default=4.0, gt=0)
    root_tolerance: float = Field(default=1e-10, gt=0)
    bracket_tolerance: float = Field(default=1e-12, gt=0)

    # Monte Carlo fallback for moment oracles
    moment_mc_samples: int = Field(default=1_000_000, ge=100)
    moment_mc_seed: int = Field(default=7, ge=0)

    # Output
    output_dir: str = Field(default="runs")


# Global settings instance
settings = Settings()


# Double-limit schedule for the large deviation spectrum (largest first)
EPSILON_SCHEDULE: Tuple[float, ...] = (0.2, 0.1, 0.05)

# Default moment orders for structure exponents
DEFAULT_Q_LIST: Tuple[float, ...] = (0.0, 0.5, 1.0, 1.5, 2.0)

# Generations traced by default in `simulate`
TRACE_GENERATIONS: Tuple[int, ...] = (9, 11, 14)


def get_output_files() -> Dict[str, str]:
    """Returns the output file-name templates."""
    return {
        "paths": "paths_n{n}.csv",
        "manifest": "manifest.json",
        "phi_report": "phi_report.json",
        "spectrum_report": "spectrum_report.json",
        "histogram": "histogram_n{n}.csv",
        "verify_report": "verify_report.json",
    }
