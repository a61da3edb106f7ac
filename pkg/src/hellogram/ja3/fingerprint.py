"""
Reference JA3 implementation.

JA3 renders five ClientHello fields in decimal (version, cipher suites,
extension types, elliptic curves, point formats), joins values with "-" and
fields with ",", and hashes the string with MD5. GREASE values are ignored.
"""

import hashlib
import re
from typing import TYPE_CHECKING, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, field_validator

from hellogram.wire.clienthello import (
    EXT_EC_POINT_FORMATS,
    EXT_SUPPORTED_GROUPS,
    ParsedClientHello,
)
from hellogram.wire.scrub import FeatureBytes

if TYPE_CHECKING:
    from hellogram.ja3.repository import LabelRepository

# RFC 8701 GREASE values.
GREASE_VALUES = frozenset(
    {
        0x0A0A,
        0x1A1A,
        0x2A2A,
        0x3A3A,
        0x4A4A,
        0x5A5A,
        0x6A6A,
        0x7A7A,
        0x8A8A,
        0x9A9A,
        0xAAAA,
        0xBABA,
        0xCACA,
        0xDADA,
        0xEAEA,
        0xFAFA,
    }
)

UNKNOWN_LABEL = "Unknown"

_HASH_PATTERN = re.compile(r"^[0-9a-f]{32}$")


def is_grease(value: int) -> bool:
    return value in GREASE_VALUES


def _without_grease(values: Sequence[int]) -> List[int]:
    return [v for v in values if v not in GREASE_VALUES]


def supported_groups(parsed: ParsedClientHello) -> List[int]:
    """Elliptic curve codes from the supported_groups extension, wire order."""
    ext = parsed.extension(EXT_SUPPORTED_GROUPS)
    if ext is None or len(ext.body) < 2:
        return []
    declared = int.from_bytes(ext.body[:2], "big")
    data = ext.body[2 : 2 + declared]
    return [int.from_bytes(data[i : i + 2], "big") for i in range(0, len(data) - 1, 2)]


def ec_point_formats(parsed: ParsedClientHello) -> List[int]:
    """Point format codes from the ec_point_formats extension, wire order."""
    ext = parsed.extension(EXT_EC_POINT_FORMATS)
    if ext is None or not ext.body:
        return []
    return list(ext.body[1 : 1 + ext.body[0]])


def ja3_fields(parsed: ParsedClientHello) -> List[List[int]]:
    """The five JA3 fields with GREASE removed, as integer lists."""
    return [
        [parsed.legacy_version],
        _without_grease(parsed.cipher_suites),
        _without_grease(parsed.extension_types()),
        _without_grease(supported_groups(parsed)),
        ec_point_formats(parsed),
    ]


def ja3_string(parsed: ParsedClientHello) -> str:
    """Build the JA3 decimal string, e.g. ``"771,4865-4866,,,"``."""
    return ",".join("-".join(str(v) for v in field) for field in ja3_fields(parsed))


def ja3_hash(decimal_string: str) -> str:
    """Lowercase hex MD5 of the exact UTF-8 bytes of the string."""
    return hashlib.md5(decimal_string.encode("utf-8")).hexdigest()


def extract_ja3_bytes(parsed: ParsedClientHello, label: Optional[str] = None, source_id: str = "") -> FeatureBytes:
    """Flatten the JA3 fields into a byte sequence, in JA3 field order.

    16-bit codes (version, ciphers, extension types, curves) contribute two
    octets high byte first; point formats contribute one octet each.
    """
    version, ciphers, extensions, curves, formats = ja3_fields(parsed)
    data = bytearray()
    for code in (*version, *ciphers, *extensions, *curves):
        data += code.to_bytes(2, "big")
    data += bytes(formats)
    return FeatureBytes(data=bytes(data), label=label, source_id=source_id)


class Ja3Record(BaseModel):
    """JA3 decimal string, its hash and the label it resolves to."""

    model_config = ConfigDict(frozen=True)

    decimal_string: str
    hash: str
    label: Optional[str] = None

    @field_validator("decimal_string")
    @classmethod
    def validate_field_count(cls, v: str) -> str:
        if v.count(",") != 4:
            raise ValueError(f"JA3 string must have 5 comma-delimited fields: {v!r}")
        return v

    @field_validator("hash")
    @classmethod
    def validate_hash(cls, v: str) -> str:
        if not _HASH_PATTERN.match(v):
            raise ValueError(f"JA3 hash must be 32 lowercase hex characters: {v!r}")
        return v

    @classmethod
    def from_parsed(
        cls, parsed: ParsedClientHello, repo: Optional["LabelRepository"] = None
    ) -> "Ja3Record":
        decimal_string = ja3_string(parsed)
        digest = ja3_hash(decimal_string)
        label = repo.lookup(digest) if repo is not None else None
        return cls(decimal_string=decimal_string, hash=digest, label=label)


def label(parsed: ParsedClientHello, repo: "LabelRepository") -> str:
    """Resolve a ClientHello to its repository label, or "Unknown"."""
    return repo.lookup(ja3_hash(ja3_string(parsed)))
