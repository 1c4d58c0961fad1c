"""Application settings and configuration management."""

from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application configuration settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="CAGEN_",
        case_sensitive=False,
        extra="ignore",
    )

    # Search Configuration
    population_size: int = Field(default=40, ge=2, description="Population size D")
    max_iterations: int = Field(default=100, ge=1, description="Max iterations T per row")
    magnitude: float = Field(default=3.0, gt=0, description="Radius constant M")
    gamma: float = Field(default=0.8, ge=0.0, le=1.0, description="Q-learning discount")
    levy_beta: float = Field(default=1.5, description="Levy flight exponent")
    early_exit: bool = Field(default=True, description="Stop a row search at max fitness")
    qtable_reset_per_round: bool = Field(
        default=False, description="Reset the Q-table before every row search"
    )
    record_qtable: bool = Field(
        default=False, description="Dump the Q-table into the convergence trace"
    )
    lookahead_rows: int = Field(
        default=1024, ge=0,
        description="Break best-row ties by full-space lookahead when the row space is at most this large",
    )
    max_tuples: int = Field(
        default=50_000_000, ge=1, description="Refuse tuple stores larger than this"
    )

    # Benchmark Configuration
    parallel: int = Field(default=1, ge=1, description="Concurrent benchmark runs")
    repetitions: int = Field(default=30, ge=1, description="Runs per strategy")
    base_seed: int = Field(default=20190101, description="Seed of run index 0")
    output_dir: Path = Field(
        default=Path("bench-results"), description="Benchmark output directory"
    )

    # Logging Configuration
    log_level: str = Field(default="INFO", description="Logging level")
    log_file: Optional[Path] = Field(default=None, description="Log file path")

    @field_validator("levy_beta")
    @classmethod
    def validate_levy_beta(cls, v: float) -> float:
        """Levy exponent must lie in (1, 2]."""
        if not 1.0 < v <= 2.0:
            raise ValueError("levy_beta must be in (1, 2]")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        v = v.upper()
        if v not in valid_levels:
            raise ValueError(f"Log level must be one of: {valid_levels}")
        return v

    @field_validator("log_file", mode="before")
    @classmethod
    def expand_path(cls, v):
        """Expand user path and create parent directories."""
        if v in (None, ""):
            return None
        if isinstance(v, str):
            v = Path(v)
        if isinstance(v, Path):
            v = v.expanduser().resolve()
            v.parent.mkdir(parents=True, exist_ok=True)
        return v


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """Get application settings instance."""
    return settings


def reload_settings() -> Settings:
    """Reload settings from environment and config files."""
    global settings
    settings = Settings()
    return settings
