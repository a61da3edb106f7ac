"""
The hypothesis set: one positional-unigram model per label.

ModelSet supports on-the-fly updates. Writers are serialized by a lock and
publish a new label map on every change, so concurrent readers see either the
state before or after an update.
"""

import logging
import threading
from collections import defaultdict
from enum import Enum
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional

from hellogram.core.config import DEFAULT_DELTA
from hellogram.core.errors import EmptyCorpus
from hellogram.features import ByteMode, featurize
from hellogram.ja3.fingerprint import UNKNOWN_LABEL
from hellogram.ja3.repository import LabelRepository
from hellogram.pum.matrix import (
    FrequencyMatrix,
    PumModel,
    accumulate,
    accumulate_many,
    normalize,
)
from hellogram.wire.clienthello import RawClientHello, parse_client_hello
from hellogram.wire.scrub import FeatureBytes

logger = logging.getLogger(__name__)


class ModelEntry(NamedTuple):
    counts: FrequencyMatrix
    model: PumModel


class UpdateStatus(str, Enum):
    """Outcome of absorbing one sequence into a ModelSet."""

    ADDED = "added"
    CREATED = "created"
    DUPLICATE = "duplicate"
    UNKNOWN = "unknown"


class ModelSet:
    """Label to (FrequencyMatrix, PumModel) map with a shared delta.

    Example:
        ```python
        models = build_models(corpus, delta=1e-8)
        for label in models:
            print(label, models[label].model.m)
        ```
    """

    def __init__(
        self,
        delta: float = DEFAULT_DELTA,
        byte_mode: ByteMode = ByteMode.ALL,
        entries: Optional[Dict[str, ModelEntry]] = None,
    ):
        if not 0.0 < delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {delta}")
        self.delta = delta
        self.byte_mode = ByteMode(byte_mode)
        self._entries: Dict[str, ModelEntry] = dict(entries or {})
        self._write_lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, label: object) -> bool:
        return label in self._entries

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels())

    def __getitem__(self, label: str) -> ModelEntry:
        return self._entries[label]

    def labels(self) -> List[str]:
        """Model labels, sorted."""
        return sorted(self._entries)

    def get(self, label: str) -> Optional[ModelEntry]:
        return self._entries.get(label)

    def models(self) -> List[PumModel]:
        """Snapshot of every PumModel, in label order."""
        entries = self._entries
        return [entries[label].model for label in sorted(entries)]

    def featurize(self, raw: RawClientHello, label: Optional[str] = None) -> FeatureBytes:
        """Parse and featurize a hello the way this set's models were trained."""
        return featurize(parse_client_hello(raw), self.byte_mode, label=label, source_id=raw.source_id)

    def absorb(self, x: FeatureBytes) -> UpdateStatus:
        """Accumulate one labeled sequence into its label's model.

        Already-seen sequences are skipped; a new label creates a new model.
        Only the affected model is renormalized.
        """
        if x.label is None or x.label == UNKNOWN_LABEL:
            return UpdateStatus.UNKNOWN

        with self._write_lock:
            current = self._entries.get(x.label)
            if current is not None and current.counts.has_seen(x):
                logger.debug(f"[ModelSet] Duplicate sequence for {x.label!r} skipped")
                return UpdateStatus.DUPLICATE

            base = current.counts if current is not None else FrequencyMatrix.empty(x.label, self.delta)
            counts = accumulate(base, x)
            entries = dict(self._entries)
            entries[x.label] = ModelEntry(counts=counts, model=normalize(counts))
            self._entries = entries

        if current is None:
            logger.info(f"[ModelSet] Created model for new label {x.label!r}")
            return UpdateStatus.CREATED
        return UpdateStatus.ADDED


def _check_label(x: FeatureBytes) -> str:
    if x.label is None or x.label == UNKNOWN_LABEL:
        raise ValueError(
            f"training sequences need a label other than {UNKNOWN_LABEL!r} (source {x.source_id!r})"
        )
    return x.label


def build_models(
    corpus: Iterable[FeatureBytes],
    delta: float = DEFAULT_DELTA,
    byte_mode: ByteMode = ByteMode.ALL,
) -> ModelSet:
    """Create one model per label from a scrubbed, labeled corpus.

    The corpus is partitioned by label; each partition is deduplicated,
    accumulated and normalized. Input order does not affect the result.

    Args:
        corpus: Labeled feature sequences.
        delta: Smoothing constant in (0, 1).
        byte_mode: Feature mode the corpus was produced with, stored with the set.

    Returns:
        The populated ModelSet.

    Raises:
        EmptyCorpus: The corpus holds no sequences.
        ValueError: A sequence is unlabeled or labeled "Unknown".
    """
    partitions: Dict[str, Dict[bytes, FeatureBytes]] = defaultdict(dict)
    for x in corpus:
        partitions[_check_label(x)].setdefault(x.digest(), x)

    if not partitions:
        raise EmptyCorpus("cannot build models from an empty corpus")

    entries: Dict[str, ModelEntry] = {}
    for label, unique in partitions.items():
        counts = accumulate_many(FrequencyMatrix.empty(label, delta), unique.values())
        entries[label] = ModelEntry(counts=counts, model=normalize(counts))

    logger.info(
        f"[ModelSet] Built {len(entries)} models from "
        f"{sum(len(p) for p in partitions.values())} unique sequences"
    )
    return ModelSet(delta=delta, byte_mode=byte_mode, entries=entries)


def update_with_status(
    models: ModelSet, raw: RawClientHello, repo: LabelRepository
) -> UpdateStatus:
    """Label a hello through JA3 and absorb it, reporting what happened.

    Raises:
        ParseError: The hello cannot be parsed.
    """
    parsed = parse_client_hello(raw)
    app_label = repo.label_for(parsed)
    if app_label == UNKNOWN_LABEL:
        logger.debug(f"[ModelSet] {raw.source_id or 'hello'} has an unknown JA3 hash, skipped")
        return UpdateStatus.UNKNOWN
    return models.absorb(featurize(parsed, models.byte_mode, label=app_label, source_id=raw.source_id))


def update(models: ModelSet, raw: RawClientHello, repo: LabelRepository) -> ModelSet:
    """Absorb one raw hello into ``models`` in place and return the set."""
    update_with_status(models, raw, repo)
    return models
