"""
Positional-unigram frequency counts and their normalized probabilities.

A FrequencyMatrix stores integer increments per (position, byte value); the
smoothed count of a cell is its increment plus delta. Normalizing each row of
smoothed counts gives the PumModel: one categorical distribution over byte
values 0-255 per position.
"""

import logging
from typing import FrozenSet, Iterable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from hellogram.core.errors import LabelMismatch
from hellogram.wire.scrub import FeatureBytes

logger = logging.getLogger(__name__)

BYTE_VALUES = 256


def _as_values(x: FeatureBytes) -> np.ndarray:
    return np.frombuffer(x.data, dtype=np.uint8)


class FrequencyMatrix(BaseModel):
    """Per-label running byte counts, one row per position.

    Instances are immutable: accumulate() returns a new matrix, so readers
    holding a reference never observe a partially updated row.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    label: str
    delta: float = Field(..., gt=0.0, lt=1.0)
    increments: np.ndarray = Field(..., description="int64 array of shape (m, 256)")
    n_sequences: int = Field(default=0, ge=0)
    seen: FrozenSet[bytes] = Field(
        default_factory=frozenset, description="Content digests of absorbed sequences"
    )

    @field_validator("increments")
    @classmethod
    def validate_increments(cls, v: np.ndarray) -> np.ndarray:
        if v.ndim != 2 or v.shape[1] != BYTE_VALUES:
            raise ValueError(f"increments must have shape (m, {BYTE_VALUES}), got {v.shape}")
        if v.size and v.min() < 0:
            raise ValueError("increments must be non-negative")
        frozen = np.array(v, dtype=np.int64)
        frozen.setflags(write=False)
        return frozen

    @classmethod
    def empty(cls, label: str, delta: float) -> "FrequencyMatrix":
        return cls(label=label, delta=delta, increments=np.zeros((0, BYTE_VALUES), dtype=np.int64))

    @property
    def m(self) -> int:
        return int(self.increments.shape[0])

    @property
    def counts(self) -> np.ndarray:
        """Smoothed counts: increments + delta, as float64."""
        return self.increments + self.delta

    def has_seen(self, x: FeatureBytes) -> bool:
        return x.digest() in self.seen


def _grown(increments: np.ndarray, rows: int) -> np.ndarray:
    out = np.zeros((max(rows, increments.shape[0]), BYTE_VALUES), dtype=np.int64)
    out[: increments.shape[0]] = increments
    return out


def accumulate_many(counts: FrequencyMatrix, xs: Iterable[FeatureBytes]) -> FrequencyMatrix:
    """Absorb several sequences into a copy of ``counts``.

    Every sequence is counted; callers deduplicate beforehand.

    Raises:
        LabelMismatch: A sequence carries a label other than the matrix label.
    """
    batch = list(xs)
    for x in batch:
        if x.label != counts.label:
            raise LabelMismatch(
                f"sequence labeled {x.label!r} cannot update the {counts.label!r} matrix",
                details={"expected": counts.label, "actual": x.label, "source_id": x.source_id},
            )

    longest = max((len(x) for x in batch), default=0)
    increments = _grown(counts.increments, longest)
    for x in batch:
        values = _as_values(x)
        # One cell per row, so fancy-index increment never double counts.
        increments[np.arange(values.size), values] += 1

    return FrequencyMatrix(
        label=counts.label,
        delta=counts.delta,
        increments=increments,
        n_sequences=counts.n_sequences + len(batch),
        seen=counts.seen | {x.digest() for x in batch},
    )


def accumulate(counts: FrequencyMatrix, x: FeatureBytes) -> FrequencyMatrix:
    """Add one sequence: ``counts[i][x[i]] += 1`` for every position of x.

    The matrix grows to ``len(x)`` rows when x is longer than m; new rows start
    at delta. Rows beyond ``len(x)`` are not touched.

    Raises:
        LabelMismatch: ``x.label`` differs from the matrix label.
    """
    return accumulate_many(counts, [x])


class PumModel(BaseModel):
    """Positional-unigram byte model: row-stochastic m x 256 probabilities."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    label: str
    m: int = Field(..., ge=1)
    probs: np.ndarray
    log_probs: np.ndarray

    def probability(self, position: int, value: int) -> float:
        return float(self.probs[position, value])


def normalize(counts: FrequencyMatrix) -> PumModel:
    """Divide each row of smoothed counts by its sum.

    Raises:
        ValueError: The matrix has no rows.
    """
    if counts.m < 1:
        raise ValueError(f"cannot normalize the {counts.label!r} matrix: it has no rows")
    smoothed = counts.counts
    probs = smoothed / smoothed.sum(axis=1, keepdims=True)
    probs.setflags(write=False)
    log_probs = np.log(probs)
    log_probs.setflags(write=False)
    return PumModel(label=counts.label, m=counts.m, probs=probs, log_probs=log_probs)
