"""
Configuration management for hellogram.

This module provides a centralized configuration class that loads and validates
environment variables. Command-line flags override these values.
"""

import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

DEFAULT_DELTA = 1e-8
DEFAULT_CONFIDENCE = 0.95


class HellogramConfig(BaseModel):
    """
    Centralized configuration for training, inference and experiments.

    Loads configuration from environment variables with sensible defaults.
    """

    # Reproducibility
    seed: int = Field(default=0, ge=0, description="Base seed for every random draw")

    # Model construction
    delta: float = Field(
        default=DEFAULT_DELTA, gt=0.0, lt=1.0, description="Additive smoothing constant"
    )

    # Experiment runner
    jobs: int = Field(default=1, ge=1, description="Worker cap for experiment trials")
    confidence: float = Field(
        default=DEFAULT_CONFIDENCE, gt=0.0, lt=1.0, description="Two-sided confidence level"
    )

    # Inference
    min_score: Optional[float] = Field(
        None, description="Report Unknown when the best mean log-likelihood falls below this"
    )

    # Diagnostics
    log_level: str = Field(default="INFO", description="Logging level")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        valid_levels = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        v_upper = v.upper()
        if v_upper not in valid_levels:
            raise ValueError(f"Invalid log level: {v}. Must be one of {valid_levels}")
        return v_upper

    @classmethod
    def from_env(cls, dotenv_path: Optional[str] = None) -> "HellogramConfig":
        """
        Create configuration from environment variables.

        A ``.env`` file is loaded first when present; variables already set in the
        process environment win over the file.

        Environment variables:
        - HELLOGRAM_SEED -> seed
        - HELLOGRAM_DELTA -> delta
        - HELLOGRAM_JOBS -> jobs
        - HELLOGRAM_CONFIDENCE -> confidence
        - HELLOGRAM_MIN_SCORE -> min_score
        - HELLOGRAM_LOG_LEVEL -> log_level

        Returns:
            HellogramConfig: Configured instance loaded from environment.

        Raises:
            pydantic.ValidationError: If a variable holds an invalid value.
        """
        load_dotenv(dotenv_path=dotenv_path, override=False)

        min_score = os.getenv("HELLOGRAM_MIN_SCORE")
        return cls(
            seed=int(os.getenv("HELLOGRAM_SEED", "0")),
            delta=float(os.getenv("HELLOGRAM_DELTA", str(DEFAULT_DELTA))),
            jobs=int(os.getenv("HELLOGRAM_JOBS", "1")),
            confidence=float(os.getenv("HELLOGRAM_CONFIDENCE", str(DEFAULT_CONFIDENCE))),
            min_score=float(min_score) if min_score else None,
            log_level=os.getenv("HELLOGRAM_LOG_LEVEL", "INFO"),
        )

    def __repr__(self) -> str:
        return (
            f"HellogramConfig(seed={self.seed}, delta={self.delta}, jobs={self.jobs}, "
            f"confidence={self.confidence}, log_level={self.log_level})"
        )
