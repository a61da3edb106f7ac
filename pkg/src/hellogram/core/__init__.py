"""Core utilities for hellogram: configuration, errors and logging setup."""

from hellogram.core.config import DEFAULT_CONFIDENCE, DEFAULT_DELTA, HellogramConfig
from hellogram.core.errors import ErrorCodes, HellogramError
from hellogram.core.logging import configure_logging

__all__ = [
    "DEFAULT_CONFIDENCE",
    "DEFAULT_DELTA",
    "HellogramConfig",
    "ErrorCodes",
    "HellogramError",
    "configure_logging",
]
