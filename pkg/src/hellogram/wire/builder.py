"""
Fluent builder for well-formed ClientHello messages.

Used by the synthetic corpus generator and by tests that need hellos differing
in exactly one field.
"""

from typing import List, Optional, Sequence, Tuple

from hellogram.wire.clienthello import (
    EXT_ALPN,
    EXT_EC_POINT_FORMATS,
    EXT_KEY_SHARE,
    EXT_PADDING,
    EXT_SERVER_NAME,
    EXT_SIGNATURE_ALGORITHMS,
    EXT_SUPPORTED_GROUPS,
    EXT_SUPPORTED_VERSIONS,
    HANDSHAKE_CLIENT_HELLO,
    RANDOM_LEN,
    Extension,
    ParsedClientHello,
    RawClientHello,
    serialize,
)


def server_name_body(host: str) -> bytes:
    name = host.encode("ascii")
    entry = b"\x00" + len(name).to_bytes(2, "big") + name
    return len(entry).to_bytes(2, "big") + entry


def u16_list_body(values: Sequence[int]) -> bytes:
    """Body of a 2-byte-length-prefixed list of 16-bit codes (supported_groups, sigalgs)."""
    encoded = b"".join(v.to_bytes(2, "big") for v in values)
    return len(encoded).to_bytes(2, "big") + encoded


def ec_point_formats_body(formats: Sequence[int]) -> bytes:
    return bytes([len(formats)]) + bytes(formats)


def key_share_body(shares: Sequence[Tuple[int, bytes]]) -> bytes:
    entries = b"".join(
        group.to_bytes(2, "big") + len(key).to_bytes(2, "big") + key for group, key in shares
    )
    return len(entries).to_bytes(2, "big") + entries


def alpn_body(protocols: Sequence[str]) -> bytes:
    entries = b"".join(bytes([len(p)]) + p.encode("ascii") for p in protocols)
    return len(entries).to_bytes(2, "big") + entries


def supported_versions_body(versions: Sequence[int]) -> bytes:
    encoded = b"".join(v.to_bytes(2, "big") for v in versions)
    return bytes([len(encoded)]) + encoded


class ClientHelloBuilder:
    """Accumulates ClientHello fields and emits a ParsedClientHello or raw bytes.

    Example:
        ```python
        hello = (
            ClientHelloBuilder()
            .ciphers([0x1301, 0x1302])
            .server_name("example.com")
            .supported_groups([29, 23])
            .build()
        )
        ```
    """

    def __init__(self, legacy_version: int = 0x0303, record_version: Optional[int] = 0x0301):
        self._legacy_version = legacy_version
        self._record_version = record_version
        self._random = bytes(RANDOM_LEN)
        self._session_id = b""
        self._ciphers: List[int] = [0x1301]
        self._compression: List[int] = [0]
        self._extensions: List[Extension] = []
        self._extensions_block = True

    def version(self, legacy_version: int) -> "ClientHelloBuilder":
        self._legacy_version = legacy_version
        return self

    def unframed(self) -> "ClientHelloBuilder":
        """Emit a bare handshake message without the record header."""
        self._record_version = None
        return self

    def random(self, value: bytes) -> "ClientHelloBuilder":
        self._random = value
        return self

    def session_id(self, value: bytes) -> "ClientHelloBuilder":
        self._session_id = value
        return self

    def ciphers(self, codes: Sequence[int]) -> "ClientHelloBuilder":
        self._ciphers = list(codes)
        return self

    def compression(self, methods: Sequence[int]) -> "ClientHelloBuilder":
        self._compression = list(methods)
        return self

    def no_extensions_block(self) -> "ClientHelloBuilder":
        self._extensions_block = False
        self._extensions = []
        return self

    def extension(self, ext_type: int, body: bytes = b"") -> "ClientHelloBuilder":
        self._extensions.append(Extension(type=ext_type, body=body))
        self._extensions_block = True
        return self

    def server_name(self, host: str) -> "ClientHelloBuilder":
        return self.extension(EXT_SERVER_NAME, server_name_body(host))

    def supported_groups(self, groups: Sequence[int]) -> "ClientHelloBuilder":
        return self.extension(EXT_SUPPORTED_GROUPS, u16_list_body(groups))

    def ec_point_formats(self, formats: Sequence[int]) -> "ClientHelloBuilder":
        return self.extension(EXT_EC_POINT_FORMATS, ec_point_formats_body(formats))

    def signature_algorithms(self, algorithms: Sequence[int]) -> "ClientHelloBuilder":
        return self.extension(EXT_SIGNATURE_ALGORITHMS, u16_list_body(algorithms))

    def alpn(self, protocols: Sequence[str]) -> "ClientHelloBuilder":
        return self.extension(EXT_ALPN, alpn_body(protocols))

    def supported_versions(self, versions: Sequence[int]) -> "ClientHelloBuilder":
        return self.extension(EXT_SUPPORTED_VERSIONS, supported_versions_body(versions))

    def key_share(self, shares: Sequence[Tuple[int, bytes]]) -> "ClientHelloBuilder":
        return self.extension(EXT_KEY_SHARE, key_share_body(shares))

    def padding(self, length: int) -> "ClientHelloBuilder":
        return self.extension(EXT_PADDING, bytes(length))

    def build(self) -> ParsedClientHello:
        body = ParsedClientHello(
            record_header=None,
            handshake_header=bytes([HANDSHAKE_CLIENT_HELLO, 0, 0, 0]),
            legacy_version=self._legacy_version,
            random=self._random,
            session_id=self._session_id,
            cipher_suites=tuple(self._ciphers),
            compression_methods=tuple(self._compression),
            extensions=tuple(self._extensions),
            has_extensions_block=self._extensions_block,
        )
        # Round through serialize so both headers carry consistent lengths.
        handshake = serialize(body)
        header = handshake[:4]
        record_header = None
        if self._record_version is not None:
            record_header = (
                b"\x16" + self._record_version.to_bytes(2, "big") + len(handshake).to_bytes(2, "big")
            )
        return body.model_copy(update={"handshake_header": header, "record_header": record_header})

    def to_raw(self, source_id: str = "") -> RawClientHello:
        return RawClientHello(data=serialize(self.build()), source_id=source_id)
