"""Feature extraction modes shared by training, inference and evaluation."""

from enum import Enum
from typing import Optional

from hellogram.ja3.fingerprint import extract_ja3_bytes
from hellogram.wire.clienthello import ParsedClientHello
from hellogram.wire.scrub import FeatureBytes, scrub


class ByteMode(str, Enum):
    """Which bytes of a ClientHello feed the positional models."""

    ALL = "all"  # every non-random octet
    JA3 = "ja3"  # only the five JA3 fields


def featurize(
    parsed: ParsedClientHello,
    mode: ByteMode = ByteMode.ALL,
    label: Optional[str] = None,
    source_id: str = "",
) -> FeatureBytes:
    if mode == ByteMode.JA3:
        return extract_ja3_bytes(parsed, label=label, source_id=source_id)
    return scrub(parsed, label=label, source_id=source_id)
