"""
hellogram

TLS ClientHello fingerprinting with positional-unigram byte models.

- wire: ClientHello parsing, serialization and scrubbing
- ja3: JA3 fingerprints and label repositories
- pum: per-label positional byte models, updates and persistence
- infer: maximum mean log-likelihood classification
- stunt: cipher-stunting perturbations of the cipher suite list
- evalharness: k-fold experiments, metrics and CSV reports
- ingest: hex-line, pcap and synthetic corpora
"""

__version__ = "0.1.0"

from hellogram.core import HellogramConfig, HellogramError, configure_logging
from hellogram.features import ByteMode, featurize
from hellogram.infer import Prediction, predict, predict_batch
from hellogram.ja3 import UNKNOWN_LABEL, LabelRepository, ja3_hash, ja3_string, label, load_repository
from hellogram.pum import ModelSet, build_models, load, save, update
from hellogram.stunt import PerturbationKind, PerturbationSpec, perturb
from hellogram.wire import ParsedClientHello, RawClientHello, parse_client_hello, scrub, serialize

__all__ = [
    "__version__",
    # Core
    "HellogramConfig",
    "HellogramError",
    "configure_logging",
    # Wire
    "RawClientHello",
    "ParsedClientHello",
    "parse_client_hello",
    "serialize",
    "scrub",
    # JA3
    "UNKNOWN_LABEL",
    "LabelRepository",
    "ja3_string",
    "ja3_hash",
    "label",
    "load_repository",
    # Models
    "ByteMode",
    "featurize",
    "ModelSet",
    "build_models",
    "update",
    "load",
    "save",
    # Inference
    "Prediction",
    "predict",
    "predict_batch",
    # Perturbation
    "PerturbationKind",
    "PerturbationSpec",
    "perturb",
]
