"""
Autocrat - Configuration Management

Centralized configuration for the solver, the strategy synthesizer and the
verification harness.
"""

import os
from typing import Literal

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings and configuration using Pydantic."""

    model_config = SettingsConfigDict(
        env_prefix="AUTOCRAT_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )

    # Application metadata
    PROJECT_NAME: str = "Autocrat"
    VERSION: str = "1.0.0"
    ENVIRONMENT: str = "development"

    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_FORMAT: Literal["json", "console"] = "console"

    # Solver
    DEFAULT_TOL: float = 1e-9
    TIE_FACTOR: float = 8.0  # argmin/argmax membership is within TIE_FACTOR * tol
    INEQUALITY_FACTOR: float = 8.0
    DRIFT_FACTOR: float = 64.0  # controller drift is DRIFT_FACTOR * tol / (1 - lambda)

    # Simulation
    DEFAULT_EPISODES: int = 100_000
    DEFAULT_HORIZON: int = 20
    DEFAULT_SEED: int = 0
    ENUMERATION_BUDGET: int = 2**22
    CONFIDENCE: float = 0.99
    THREADS: int = os.cpu_count() or 1

    # Command line
    OUTPUT_FORMAT: Literal["text", "json"] = "text"

    @field_validator("LOG_LEVEL", mode="before")
    @classmethod
    def normalise_log_level(cls, v):
        """Accept log levels in any case."""
        return str(v).upper()

    @field_validator("DEFAULT_TOL", "TIE_FACTOR", "INEQUALITY_FACTOR", "DRIFT_FACTOR")
    @classmethod
    def validate_positive_real(cls, v):
        if v <= 0:
            raise ValueError("must be positive")
        return v

    @field_validator("DEFAULT_EPISODES", "ENUMERATION_BUDGET", "THREADS")
    @classmethod
    def validate_positive_count(cls, v):
        if v < 1:
            raise ValueError("must be at least 1")
        return v

    @field_validator("CONFIDENCE")
    @classmethod
    def validate_confidence(cls, v):
        if not 0.0 < v < 1.0:
            raise ValueError("confidence must lie in (0, 1)")
        return v


# Create settings instance
settings = Settings()

# Environment-specific overrides
if settings.ENVIRONMENT == "production":
    settings.LOG_FORMAT = "json"
