#!/usr/bin/env python3
"""
crnmix configuration settings

Values come from the environment (or a .env file) and may be overridden
per invocation by CLI flags.
"""

from functools import lru_cache
from pathlib import Path

from pydantic import Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class CRNSettings(BaseSettings):
    """crnmix configuration settings"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        populate_by_name=True,
        extra="ignore",
    )

    # Logging
    log_level: str = Field(default="INFO", alias="CRNMIX_LOG_LEVEL")
    log_format: str = Field(default="console", alias="CRNMIX_LOG_FORMAT")

    # Simulation
    seed: int = Field(default=20240101, alias="CRNMIX_SEED")
    replicates: int = Field(default=100_000, alias="CRNMIX_REPLICATES")
    max_events: int = Field(default=10_000_000, alias="CRNMIX_MAX_EVENTS")
    explosion_tolerance: float = Field(default=0.001, alias="CRNMIX_EXPLOSION_TOLERANCE")
    sim_box: int = Field(default=200, alias="CRNMIX_SIM_BOX")
    threads: int = Field(default=1, alias="CRNMIX_THREADS")

    # Drift scans
    drift_box: int = Field(default=60, alias="CRNMIX_DRIFT_BOX")
    max_box_states: int = Field(default=5_000_000, alias="CRNMIX_MAX_BOX_STATES")

    # Equilibrium
    newton_tol: float = Field(default=1e-12, alias="CRNMIX_NEWTON_TOL")
    newton_max_iter: int = Field(default=200, alias="CRNMIX_NEWTON_MAX_ITER")
    balance_tol: float = Field(default=1e-9, alias="CRNMIX_BALANCE_TOL")

    # Mixing
    epsilon: float = Field(default=0.1, alias="CRNMIX_EPSILON")

    # Output
    output_dir: Path = Field(default=Path("./crnmix-out"), alias="CRNMIX_OUTPUT_DIR")

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level: {value}")
        return level

    @field_validator("log_format")
    @classmethod
    def _known_format(cls, value: str) -> str:
        if value not in {"console", "json"}:
            raise ValueError(f"log format must be 'console' or 'json', got {value}")
        return value

    @model_validator(mode="after")
    def _check_ranges(self) -> "CRNSettings":
        problems = []
        if self.replicates < 1:
            problems.append("replicates must be >= 1")
        if self.max_events < 1:
            problems.append("max_events must be >= 1")
        if self.threads < 1:
            problems.append("threads must be >= 1")
        if self.sim_box < 2 or self.drift_box < 2:
            problems.append("box radii must be >= 2")
        if not 0.0 < self.epsilon < 0.5:
            problems.append("epsilon must lie in (0, 1/2)")
        if not 0.0 <= self.explosion_tolerance < 1.0:
            problems.append("explosion_tolerance must lie in [0, 1)")
        if self.newton_max_iter < 1:
            problems.append("newton_max_iter must be >= 1")
        if problems:
            raise ValueError("; ".join(problems))
        return self


@lru_cache(maxsize=1)
def get_settings() -> CRNSettings:
    """Process-wide settings instance."""
    return CRNSettings()
