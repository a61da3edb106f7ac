"""
Positional-unigram byte models: build, update and persist.
"""

from hellogram.pum.matrix import (
    BYTE_VALUES,
    FrequencyMatrix,
    PumModel,
    accumulate,
    accumulate_many,
    normalize,
)
from hellogram.pum.modelset import (
    ModelEntry,
    ModelSet,
    UpdateStatus,
    build_models,
    update,
    update_with_status,
)
from hellogram.pum.store import FORMAT_VERSION, MODEL_FORMAT, dumps, load, loads, save

__all__ = [
    "BYTE_VALUES",
    "FrequencyMatrix",
    "PumModel",
    "accumulate",
    "accumulate_many",
    "normalize",
    "ModelEntry",
    "ModelSet",
    "UpdateStatus",
    "build_models",
    "update",
    "update_with_status",
    "FORMAT_VERSION",
    "MODEL_FORMAT",
    "dumps",
    "load",
    "loads",
    "save",
]
