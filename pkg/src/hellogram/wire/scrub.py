"""
Feature byte extraction.

scrub() removes every octet of a ClientHello that is random per connection or
trivially altered (random, session-ID value, server_name, key_share payloads,
headers). What remains is the byte sequence the positional models are built on.
"""

import hashlib
import logging
import re
import string
from typing import Dict, Iterable, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from hellogram.core.errors import InvalidHexDigit, LabelConflict, OddDigitCount
from hellogram.wire.clienthello import (
    EXT_KEY_SHARE,
    EXT_SERVER_NAME,
    Extension,
    ParsedClientHello,
)

logger = logging.getLogger(__name__)

_HEX_DIGITS = frozenset(string.hexdigits)
_WHITESPACE = re.compile(r"\s+")


class FeatureBytes(BaseModel):
    """Scrubbed byte sequence used for training and inference."""

    model_config = ConfigDict(frozen=True)

    data: bytes
    label: Optional[str] = None
    source_id: str = Field(default="", description="Origin of the sample, carried for reports")

    def __len__(self) -> int:
        return len(self.data)

    def values(self) -> List[int]:
        """Byte values in decimal, 0-255 per position."""
        return list(self.data)

    def digest(self) -> bytes:
        """128-bit content digest, independent of label and source."""
        return hashlib.blake2b(self.data, digest_size=16).digest()

    def with_label(self, label: Optional[str]) -> "FeatureBytes":
        return self.model_copy(update={"label": label})


def hex_to_decimal(hex_pairs: Union[str, Iterable[str]]) -> List[int]:
    """Convert hexadecimal digit pairs to byte values 0-255.

    Whitespace between digits is ignored, so both ``"16 03 01"`` and
    ``["16", "03", "01"]`` yield ``[22, 3, 1]``.

    Raises:
        InvalidHexDigit: A character outside [0-9a-fA-F] is present.
        OddDigitCount: The digits do not pair up.
    """
    text = hex_pairs if isinstance(hex_pairs, str) else "".join(hex_pairs)
    digits = _WHITESPACE.sub("", text)
    for position, char in enumerate(digits):
        if char not in _HEX_DIGITS:
            raise InvalidHexDigit(
                f"invalid hexadecimal digit {char!r} at position {position}",
                details={"position": position, "char": char},
            )
    if len(digits) % 2:
        raise OddDigitCount(f"{len(digits)} hexadecimal digits cannot form byte pairs")
    return list(bytes.fromhex(digits))


def _scrub_key_share(body: bytes) -> bytes:
    """Keep the list length, group ids and key lengths; drop key-exchange octets."""
    if len(body) < 2:
        return body
    out = bytearray(body[:2])
    end = min(len(body), 2 + int.from_bytes(body[:2], "big"))
    offset = 2
    while offset + 4 <= end:
        group_and_len = body[offset : offset + 4]
        key_len = int.from_bytes(group_and_len[2:4], "big")
        out += group_and_len
        offset += 4 + key_len
    return bytes(out)


def _scrub_extension(ext: Extension) -> Optional[bytes]:
    if ext.type == EXT_SERVER_NAME:
        return None
    body = ext.body
    if ext.type == EXT_KEY_SHARE:
        # Lengths still describe the original entry so the layout stays per-stack.
        body = _scrub_key_share(body)
        return ext.type.to_bytes(2, "big") + len(ext.body).to_bytes(2, "big") + body
    return ext.type.to_bytes(2, "big") + len(body).to_bytes(2, "big") + body


def scrub(parsed: ParsedClientHello, label: Optional[str] = None, source_id: str = "") -> FeatureBytes:
    """Remove random and easily altered octets from a ClientHello.

    Removed: record and handshake headers, the 32 random octets, session-ID value
    octets (its length octet stays), the whole server_name extension and the
    key-exchange payload of every key_share entry. The extensions-block length is
    recomputed over the retained extensions. Everything else keeps wire order.
    """
    ciphers = b"".join(c.to_bytes(2, "big") for c in parsed.cipher_suites)
    parts = [
        parsed.legacy_version.to_bytes(2, "big"),
        bytes([len(parsed.session_id)]),
        len(ciphers).to_bytes(2, "big"),
        ciphers,
        bytes([len(parsed.compression_methods)]),
        bytes(parsed.compression_methods),
    ]
    if parsed.has_extensions_block or parsed.extensions:
        kept = [encoded for ext in parsed.extensions if (encoded := _scrub_extension(ext)) is not None]
        block = b"".join(kept)
        parts.append(len(block).to_bytes(2, "big"))
        parts.append(block)
    return FeatureBytes(data=b"".join(parts), label=label, source_id=source_id)


def dedupe(corpus: Iterable[FeatureBytes]) -> List[FeatureBytes]:
    """Keep one copy of each distinct byte sequence, in first-seen order.

    Raises:
        LabelConflict: The same byte sequence appears with different labels.
    """
    seen: Dict[bytes, FeatureBytes] = {}
    for item in corpus:
        first = seen.get(item.data)
        if first is None:
            seen[item.data] = item
        elif first.label != item.label:
            raise LabelConflict(
                f"identical sequence labeled {first.label!r} and {item.label!r}",
                details={
                    "labels": [first.label, item.label],
                    "sources": [first.source_id, item.source_id],
                },
            )
    if seen:
        logger.debug(f"dedupe kept {len(seen)} distinct sequences")
    return list(seen.values())
