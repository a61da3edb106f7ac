"""
Wire module: ClientHello parsing, serialization and feature byte extraction.
"""

from hellogram.wire.builder import ClientHelloBuilder
from hellogram.wire.clienthello import (
    Extension,
    ParsedClientHello,
    RawClientHello,
    parse_client_hello,
    serialize,
)
from hellogram.wire.scrub import FeatureBytes, dedupe, hex_to_decimal, scrub

__all__ = [
    "ClientHelloBuilder",
    "Extension",
    "ParsedClientHello",
    "RawClientHello",
    "parse_client_hello",
    "serialize",
    "FeatureBytes",
    "dedupe",
    "hex_to_decimal",
    "scrub",
]
