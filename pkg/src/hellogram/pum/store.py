"""
Model file persistence.

The model file is a canonical JSON document: keys sorted, no insignificant
whitespace, labels in sorted order. Counts are stored as integer increments with
delta stored once; probabilities are recomputed on load.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from hellogram.core.errors import CorruptModelFile, SchemaVersionMismatch
from hellogram.features import ByteMode
from hellogram.pum.matrix import BYTE_VALUES, FrequencyMatrix, normalize
from hellogram.pum.modelset import ModelEntry, ModelSet

logger = logging.getLogger(__name__)

MODEL_FORMAT = "hellogram-model"
FORMAT_VERSION = 1

PathLike = Union[str, Path]


class ModelRecord(BaseModel):
    """One label's counts as stored on disk."""

    label: str
    m: int = Field(..., ge=0)
    n_sequences: int = Field(..., ge=0)
    rows: List[List[int]]
    seen: List[str] = Field(default_factory=list, description="Hex content digests, sorted")

    @model_validator(mode="after")
    def validate_shape(self) -> "ModelRecord":
        if len(self.rows) != self.m:
            raise ValueError(f"model {self.label!r} declares m={self.m} but has {len(self.rows)} rows")
        for index, row in enumerate(self.rows):
            if len(row) != BYTE_VALUES:
                raise ValueError(f"model {self.label!r} row {index} has {len(row)} cells")
            if any(cell < 0 for cell in row):
                raise ValueError(f"model {self.label!r} row {index} has a negative increment")
        return self


class ModelDocument(BaseModel):
    format: str = MODEL_FORMAT
    format_version: int = FORMAT_VERSION
    delta: float = Field(..., gt=0.0, lt=1.0)
    byte_mode: ByteMode = ByteMode.ALL
    models: List[ModelRecord] = Field(default_factory=list)


def to_document(models: ModelSet) -> ModelDocument:
    records = []
    for label in models.labels():
        counts = models[label].counts
        records.append(
            ModelRecord(
                label=label,
                m=counts.m,
                n_sequences=counts.n_sequences,
                rows=counts.increments.tolist(),
                seen=sorted(digest.hex() for digest in counts.seen),
            )
        )
    return ModelDocument(delta=models.delta, byte_mode=models.byte_mode, models=records)


def dumps(models: ModelSet) -> str:
    """Render a ModelSet as canonical JSON text (byte-stable for equal state)."""
    payload = to_document(models).model_dump(mode="json")
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def save(models: ModelSet, path: PathLike) -> None:
    Path(path).write_text(dumps(models), encoding="utf-8")
    logger.info(f"[ModelStore] Saved {len(models)} models to {path}")


def _entry_from_record(record: ModelRecord, delta: float) -> ModelEntry:
    increments = np.array(record.rows, dtype=np.int64).reshape(record.m, BYTE_VALUES)
    counts = FrequencyMatrix(
        label=record.label,
        delta=delta,
        increments=increments,
        n_sequences=record.n_sequences,
        seen=frozenset(bytes.fromhex(d) for d in record.seen),
    )
    return ModelEntry(counts=counts, model=normalize(counts))


def loads(text: str, source: str = "<string>") -> ModelSet:
    """Parse model file text.

    Raises:
        CorruptModelFile: The text is not a hellogram model document.
        SchemaVersionMismatch: The document uses another format version.
    """
    try:
        payload: Any = json.loads(text)
    except json.JSONDecodeError as e:
        raise CorruptModelFile(f"{source}: not a model file ({e})", details={"path": source}) from e

    if not isinstance(payload, dict) or payload.get("format") != MODEL_FORMAT:
        raise CorruptModelFile(f"{source}: missing {MODEL_FORMAT!r} format marker", details={"path": source})

    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise SchemaVersionMismatch(
            f"{source}: format version {version!r}, expected {FORMAT_VERSION}",
            details={"path": source, "found": version, "expected": FORMAT_VERSION},
        )

    try:
        document = ModelDocument.model_validate(payload)
        entries: Dict[str, ModelEntry] = {}
        for record in document.models:
            if record.label in entries:
                raise ValueError(f"label {record.label!r} appears twice")
            if record.m == 0:
                raise ValueError(f"model {record.label!r} has no rows")
            entries[record.label] = _entry_from_record(record, document.delta)
    except (ValidationError, ValueError) as e:
        raise CorruptModelFile(f"{source}: {e}", details={"path": source}) from e

    return ModelSet(delta=document.delta, byte_mode=document.byte_mode, entries=entries)


def load(path: PathLike) -> ModelSet:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise CorruptModelFile(f"{path}: not UTF-8 text", details={"path": str(path)}) from e
    models = loads(text, source=str(path))
    logger.info(f"[ModelStore] Loaded {len(models)} models from {path}")
    return models
