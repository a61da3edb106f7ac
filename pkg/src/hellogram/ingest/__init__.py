"""
Corpus ingestion: hex-line files, pcap captures and synthetic generation.
"""

from hellogram.ingest.corpus import (
    CorpusEntry,
    CorpusFile,
    CorpusFormat,
    SkipRecord,
    repository_from_corpus,
)
from hellogram.ingest.hexline import (
    read_hexline,
    read_splits,
    split_paths,
    write_hexline,
    write_splits,
)
from hellogram.ingest.pcap import read_pcap
from hellogram.ingest.synthetic import (
    ClassProfile,
    ProfileSpec,
    allocate,
    default_profiles,
    generate_synthetic,
    split_corpus,
    tiered_weights,
)

__all__ = [
    "CorpusEntry",
    "CorpusFile",
    "CorpusFormat",
    "SkipRecord",
    "repository_from_corpus",
    "read_hexline",
    "read_splits",
    "split_paths",
    "write_hexline",
    "write_splits",
    "read_pcap",
    "ClassProfile",
    "ProfileSpec",
    "allocate",
    "default_profiles",
    "generate_synthetic",
    "split_corpus",
    "tiered_weights",
]
