"""
JA3 module: reference fingerprinting and the hash to label repository.
"""

from hellogram.ja3.fingerprint import (
    GREASE_VALUES,
    UNKNOWN_LABEL,
    Ja3Record,
    extract_ja3_bytes,
    is_grease,
    ja3_hash,
    ja3_string,
    label,
)
from hellogram.ja3.repository import (
    LabelRepository,
    load_repositories,
    load_repository,
    merge_repositories,
    repository_from_labeled,
    write_repository,
)

__all__ = [
    "GREASE_VALUES",
    "UNKNOWN_LABEL",
    "Ja3Record",
    "extract_ja3_bytes",
    "is_grease",
    "ja3_hash",
    "ja3_string",
    "label",
    "LabelRepository",
    "load_repositories",
    "load_repository",
    "merge_repositories",
    "repository_from_labeled",
    "write_repository",
]
