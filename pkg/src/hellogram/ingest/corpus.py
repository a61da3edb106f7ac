"""Corpus containers shared by every reader and writer."""

from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from hellogram.ja3.repository import LabelRepository, repository_from_labeled
from hellogram.wire.clienthello import RawClientHello, parse_client_hello


class CorpusFormat(str, Enum):
    HEXLINE = "hexline"
    PCAP = "pcap"
    SYNTHETIC = "synthetic"


class CorpusEntry(BaseModel):
    raw: RawClientHello
    label: Optional[str] = None


class SkipRecord(BaseModel):
    """A candidate record that did not become an entry."""

    source_id: str
    reason: str


class CorpusFile(BaseModel):
    """Ordered ClientHello entries plus the skips met while reading them."""

    entries: List[CorpusEntry] = Field(default_factory=list)
    format: CorpusFormat = CorpusFormat.HEXLINE
    skipped: List[SkipRecord] = Field(default_factory=list)
    malformed_packets: int = Field(default=0, description="pcap frames that failed to decode")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def candidates(self) -> int:
        """Records encountered: entries plus skips."""
        return len(self.entries) + len(self.skipped)

    def raws(self) -> List[RawClientHello]:
        return [entry.raw for entry in self.entries]

    def labels(self) -> List[Optional[str]]:
        return [entry.label for entry in self.entries]

    def skip_reasons(self) -> Dict[str, int]:
        """Skip counts keyed by reason."""
        counts: Dict[str, int] = {}
        for skip in self.skipped:
            counts[skip.reason] = counts.get(skip.reason, 0) + 1
        return counts


def repository_from_corpus(corpus: CorpusFile) -> LabelRepository:
    """Repository mapping each labeled entry's JA3 hash to its label."""
    return repository_from_labeled(
        (parse_client_hello(entry.raw), entry.label) for entry in corpus.entries if entry.label is not None
    )
