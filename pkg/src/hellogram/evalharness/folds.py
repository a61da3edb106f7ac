"""
k-fold planning over corpus splits.

Each split serves as validation exactly once; the remaining splits train.
Samples are labeled through the JA3 repository, Unknown samples are dropped and
duplicates collapse on (label, scrubbed bytes). A training sample whose
scrubbed bytes also occur in the fold's validation split is removed from that
fold's training set.
"""

import logging
from typing import Iterator, List, NamedTuple, Sequence, Set, Tuple

from pydantic import BaseModel, ConfigDict

from hellogram.core.errors import InsufficientSplits, ParseError
from hellogram.ja3.fingerprint import UNKNOWN_LABEL
from hellogram.ja3.repository import LabelRepository
from hellogram.wire.clienthello import ParsedClientHello, RawClientHello, parse_client_hello
from hellogram.wire.scrub import scrub

logger = logging.getLogger(__name__)


class LabeledSample(BaseModel):
    """A parsed hello with its JA3-derived truth label."""

    model_config = ConfigDict(frozen=True)

    parsed: ParsedClientHello
    truth: str
    key: bytes
    source_id: str = ""

    @property
    def unique_key(self) -> Tuple[str, bytes]:
        return self.truth, self.key


def _dedupe(samples: Sequence[LabeledSample]) -> List[LabeledSample]:
    seen: Set[Tuple[str, bytes]] = set()
    unique = []
    for sample in samples:
        if sample.unique_key not in seen:
            seen.add(sample.unique_key)
            unique.append(sample)
    return unique


def prepare_split(raws: Sequence[RawClientHello], repo: LabelRepository) -> List[LabeledSample]:
    """Parse, label and deduplicate one split; unparseable and Unknown hellos are dropped."""
    samples = []
    for raw in raws:
        try:
            parsed = parse_client_hello(raw)
        except ParseError as e:
            logger.debug(f"[FoldPlan] {raw.source_id}: {e.message}")
            continue
        truth = repo.label_for(parsed)
        if truth == UNKNOWN_LABEL:
            continue
        samples.append(
            LabeledSample(parsed=parsed, truth=truth, key=scrub(parsed).data, source_id=raw.source_id)
        )
    return _dedupe(samples)


class Fold(NamedTuple):
    index: int
    training: List[LabeledSample]
    validation: List[LabeledSample]


class FoldPlan(BaseModel):
    """Prepared splits; fold i validates on split i."""

    model_config = ConfigDict(frozen=True)

    splits: List[List[LabeledSample]]

    @classmethod
    def from_splits(cls, splits: Sequence[Sequence[RawClientHello]], repo: LabelRepository) -> "FoldPlan":
        """
        Raises:
            InsufficientSplits: Fewer than two splits.
        """
        if len(splits) < 2:
            raise InsufficientSplits(
                f"k-fold evaluation needs at least 2 splits, got {len(splits)}",
                details={"k": len(splits)},
            )
        prepared = [prepare_split(split, repo) for split in splits]
        logger.info(
            f"[FoldPlan] {len(prepared)} splits, "
            f"{sum(len(s) for s in prepared)} unique labeled samples"
        )
        return cls(splits=prepared)

    @property
    def k(self) -> int:
        return len(self.splits)

    @property
    def n_samples(self) -> int:
        return sum(len(split) for split in self.splits)

    def fold(self, index: int) -> Fold:
        validation = self.splits[index]
        held_out = {sample.key for sample in validation}
        pooled = [s for i, split in enumerate(self.splits) if i != index for s in split]
        training = [s for s in _dedupe(pooled) if s.key not in held_out]
        return Fold(index=index, training=training, validation=validation)

    def folds(self) -> Iterator[Fold]:
        for index in range(self.k):
            yield self.fold(index)
