"""
ClientHello field model, parser and serializer.

The parser is lossless: every octet of the input is accounted for by a field of
ParsedClientHello, and serialize() reproduces the input exactly. Record framing
is optional; an input starting with 0x16 is treated as a TLS record.
"""

from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from hellogram.core.errors import MalformedLength, NotClientHello, TruncatedMessage

CONTENT_TYPE_HANDSHAKE = 0x16
HANDSHAKE_CLIENT_HELLO = 0x01

RECORD_HEADER_LEN = 5
HANDSHAKE_HEADER_LEN = 4
RANDOM_LEN = 32
MAX_SESSION_ID_LEN = 32

# Extension type codes referenced by scrub and JA3
EXT_SERVER_NAME = 0
EXT_SUPPORTED_GROUPS = 10
EXT_EC_POINT_FORMATS = 11
EXT_SIGNATURE_ALGORITHMS = 13
EXT_ALPN = 16
EXT_PADDING = 21
EXT_EXTENDED_MASTER_SECRET = 23
EXT_SESSION_TICKET = 35
EXT_SUPPORTED_VERSIONS = 43
EXT_PSK_KEY_EXCHANGE_MODES = 45
EXT_KEY_SHARE = 51
EXT_RENEGOTIATION_INFO = 0xFF01


class RawClientHello(BaseModel):
    """Octets carrying one ClientHello, with or without record framing."""

    model_config = ConfigDict(frozen=True)

    data: bytes = Field(..., description="ClientHello octets, starting at the record header when framed")
    source_id: str = Field(default="", description="File/line or pcap frame reference")

    @field_validator("data")
    @classmethod
    def validate_non_empty(cls, v: bytes) -> bytes:
        if not v:
            raise ValueError("ClientHello bytes cannot be empty")
        return v

    @property
    def is_framed(self) -> bool:
        return self.data[0] == CONTENT_TYPE_HANDSHAKE

    def hex(self) -> str:
        return self.data.hex()


class Extension(BaseModel):
    """One extension as it appears on the wire."""

    model_config = ConfigDict(frozen=True)

    type: int = Field(..., ge=0, le=0xFFFF)
    body: bytes = b""


class ParsedClientHello(BaseModel):
    """Structured view of one ClientHello."""

    model_config = ConfigDict(frozen=True)

    record_header: Optional[bytes] = Field(
        None, description="5-octet record header; None for bare handshake input"
    )
    handshake_header: bytes = Field(..., description="4-octet handshake header")
    legacy_version: int = Field(..., ge=0, le=0xFFFF)
    random: bytes
    session_id: bytes = b""
    cipher_suites: Tuple[int, ...]
    compression_methods: Tuple[int, ...] = (0,)
    extensions: Tuple[Extension, ...] = ()
    has_extensions_block: bool = Field(
        True, description="False when the message ends after the compression methods"
    )

    @field_validator("random")
    @classmethod
    def validate_random(cls, v: bytes) -> bytes:
        if len(v) != RANDOM_LEN:
            raise ValueError(f"random must be exactly {RANDOM_LEN} octets, got {len(v)}")
        return v

    @field_validator("session_id")
    @classmethod
    def validate_session_id(cls, v: bytes) -> bytes:
        if len(v) > MAX_SESSION_ID_LEN:
            raise ValueError(f"session_id is at most {MAX_SESSION_ID_LEN} octets, got {len(v)}")
        return v

    @field_validator("cipher_suites")
    @classmethod
    def validate_cipher_suites(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if not v:
            raise ValueError("cipher_suites needs at least one entry")
        if any(not 0 <= c <= 0xFFFF for c in v):
            raise ValueError("cipher suite codes are 16-bit")
        return v

    @field_validator("compression_methods")
    @classmethod
    def validate_compression_methods(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(not 0 <= c <= 0xFF for c in v):
            raise ValueError("compression method codes are 8-bit")
        return v

    @property
    def is_framed(self) -> bool:
        return self.record_header is not None

    def extension(self, ext_type: int) -> Optional[Extension]:
        """Return the first extension of the given type, if any."""
        for ext in self.extensions:
            if ext.type == ext_type:
                return ext
        return None

    def extension_types(self) -> Tuple[int, ...]:
        return tuple(ext.type for ext in self.extensions)


class _Reader:
    """Bounds-checked cursor over a byte string."""

    def __init__(self, data: bytes, offset: int = 0, end: Optional[int] = None):
        self.data = data
        self.offset = offset
        self.end = len(data) if end is None else end

    @property
    def remaining(self) -> int:
        return self.end - self.offset

    def take(self, n: int, what: str) -> bytes:
        if n > self.remaining:
            raise TruncatedMessage(
                f"{what} needs {n} octets, {self.remaining} available",
                details={"offset": self.offset, "field": what},
            )
        chunk = self.data[self.offset : self.offset + n]
        self.offset += n
        return chunk

    def u8(self, what: str) -> int:
        return self.take(1, what)[0]

    def u16(self, what: str) -> int:
        return int.from_bytes(self.take(2, what), "big")

    def u24(self, what: str) -> int:
        return int.from_bytes(self.take(3, what), "big")


def parse_client_hello(raw: RawClientHello) -> ParsedClientHello:
    """Parse one ClientHello into its fields.

    Args:
        raw: ClientHello octets, record-framed or a bare handshake message.

    Returns:
        The parsed field model.

    Raises:
        TruncatedMessage: A length field exceeds the available bytes, including a
            ClientHello fragmented over several records.
        NotClientHello: The handshake type is not 0x01.
        MalformedLength: Inner lengths are inconsistent with the outer ones.
    """
    data = raw.data
    record_header: Optional[bytes] = None
    start = 0

    if data[0] == CONTENT_TYPE_HANDSHAKE:
        reader = _Reader(data)
        record_header = reader.take(RECORD_HEADER_LEN, "record header")
        record_len = int.from_bytes(record_header[3:5], "big")
        if record_len > reader.remaining:
            raise TruncatedMessage(
                f"record declares {record_len} octets, {reader.remaining} available",
                details={"source_id": raw.source_id},
            )
        if record_len < reader.remaining:
            raise MalformedLength(
                f"{reader.remaining - record_len} octets follow the record",
                details={"source_id": raw.source_id},
            )
        start = RECORD_HEADER_LEN

    reader = _Reader(data, start)
    handshake_header = reader.take(HANDSHAKE_HEADER_LEN, "handshake header")
    if handshake_header[0] != HANDSHAKE_CLIENT_HELLO:
        raise NotClientHello(
            f"handshake type 0x{handshake_header[0]:02x} is not a ClientHello",
            details={"source_id": raw.source_id},
        )
    body_len = int.from_bytes(handshake_header[1:4], "big")
    if body_len > reader.remaining:
        # A ClientHello continued in a following record is not reassembled.
        raise TruncatedMessage(
            f"handshake declares {body_len} octets, {reader.remaining} available",
            details={"source_id": raw.source_id},
        )
    if body_len < reader.remaining:
        raise MalformedLength(
            f"{reader.remaining - body_len} octets follow the ClientHello",
            details={"source_id": raw.source_id},
        )

    body = _Reader(data, reader.offset)
    legacy_version = body.u16("legacy_version")
    random = body.take(RANDOM_LEN, "random")

    session_id_len = body.u8("session_id length")
    if session_id_len > MAX_SESSION_ID_LEN:
        raise MalformedLength(f"session_id length {session_id_len} exceeds {MAX_SESSION_ID_LEN}")
    session_id = body.take(session_id_len, "session_id")

    cipher_len = body.u16("cipher_suites length")
    if cipher_len == 0 or cipher_len % 2:
        raise MalformedLength(f"cipher_suites length {cipher_len} must be even and non-zero")
    cipher_bytes = body.take(cipher_len, "cipher_suites")
    cipher_suites = tuple(
        int.from_bytes(cipher_bytes[i : i + 2], "big") for i in range(0, cipher_len, 2)
    )

    compression_len = body.u8("compression_methods length")
    compression_methods = tuple(body.take(compression_len, "compression_methods"))

    extensions = []
    has_extensions_block = body.remaining > 0
    if has_extensions_block:
        block_len = body.u16("extensions length")
        if block_len != body.remaining:
            raise MalformedLength(
                f"extensions block declares {block_len} octets, {body.remaining} present"
            )
        while body.remaining:
            ext_type = body.u16("extension type")
            ext_len = body.u16("extension length")
            if ext_len > body.remaining:
                raise MalformedLength(
                    f"extension 0x{ext_type:04x} declares {ext_len} octets, "
                    f"{body.remaining} left in block"
                )
            extensions.append(Extension(type=ext_type, body=body.take(ext_len, "extension body")))

    return ParsedClientHello(
        record_header=record_header,
        handshake_header=handshake_header,
        legacy_version=legacy_version,
        random=random,
        session_id=session_id,
        cipher_suites=cipher_suites,
        compression_methods=compression_methods,
        extensions=tuple(extensions),
        has_extensions_block=has_extensions_block,
    )


def encode_extensions(extensions: Tuple[Extension, ...]) -> bytes:
    """Encode extensions as type/length/body triples, without the block length."""
    return b"".join(
        ext.type.to_bytes(2, "big") + len(ext.body).to_bytes(2, "big") + ext.body
        for ext in extensions
    )


def serialize_body(parsed: ParsedClientHello) -> bytes:
    """Encode the ClientHello body (everything after the handshake header)."""
    ciphers = b"".join(c.to_bytes(2, "big") for c in parsed.cipher_suites)
    parts = [
        parsed.legacy_version.to_bytes(2, "big"),
        parsed.random,
        bytes([len(parsed.session_id)]),
        parsed.session_id,
        len(ciphers).to_bytes(2, "big"),
        ciphers,
        bytes([len(parsed.compression_methods)]),
        bytes(parsed.compression_methods),
    ]
    if parsed.has_extensions_block or parsed.extensions:
        block = encode_extensions(parsed.extensions)
        parts.append(len(block).to_bytes(2, "big"))
        parts.append(block)
    return b"".join(parts)


def serialize(parsed: ParsedClientHello) -> bytes:
    """Encode a ParsedClientHello, recomputing every length field.

    For an unmodified parse result this is the exact inverse of
    parse_client_hello.
    """
    body = serialize_body(parsed)
    handshake = parsed.handshake_header[:1] + len(body).to_bytes(3, "big") + body
    if parsed.record_header is None:
        return handshake
    return parsed.record_header[:3] + len(handshake).to_bytes(2, "big") + handshake
