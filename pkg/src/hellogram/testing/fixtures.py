"""
Reusable pytest fixtures for hellogram tests.

Usage:
    # In conftest.py
    from hellogram.testing import *
"""

from pathlib import Path
from typing import Callable, List, Optional, Sequence

import pytest

from hellogram.ingest.corpus import CorpusEntry, CorpusFile
from hellogram.ingest.hexline import write_hexline
from hellogram.ingest.synthetic import default_profiles, generate_synthetic
from hellogram.ja3.repository import LabelRepository, repository_from_labeled
from hellogram.wire.builder import ClientHelloBuilder
from hellogram.wire.clienthello import ParsedClientHello, RawClientHello, parse_client_hello
from hellogram.wire.scrub import FeatureBytes

# Canonical JA3 example: TLS 1.0 hello with SNI, groups and point formats.
JA3_VECTOR_STRING = "769,47-53-5-10-49161-49162-49171-49172-50-56-19-4,0-10-11,23-24-25,0"
JA3_VECTOR_HASH = "ada70206e40642a3e4461f35503241d5"

BROWSER_CIPHERS = [0x1301, 0x1302, 0x1303, 0xC02B, 0xC02F, 0xC02C, 0xC030, 0xCCA9]
TOOL_CIPHERS = [0x002F, 0x0035, 0x000A, 0xC013, 0xC014]


def hello_builder(
    ciphers: Sequence[int] = BROWSER_CIPHERS,
    host: str = "example.com",
    groups: Sequence[int] = (29, 23, 24),
    legacy_version: int = 0x0303,
) -> ClientHelloBuilder:
    """A realistic TLS 1.3-style hello template."""
    return (
        ClientHelloBuilder(legacy_version=legacy_version)
        .ciphers(ciphers)
        .server_name(host)
        .supported_groups(groups)
        .ec_point_formats([0])
        .signature_algorithms([0x0403, 0x0804, 0x0401])
        .alpn(["h2", "http/1.1"])
        .key_share([(groups[0], bytes(range(32)))])
        .supported_versions([0x0304, 0x0303])
    )


def make_raw(
    ciphers: Sequence[int] = BROWSER_CIPHERS,
    host: str = "example.com",
    random: Optional[bytes] = None,
    source_id: str = "",
) -> RawClientHello:
    builder = hello_builder(ciphers, host=host)
    if random is not None:
        builder.random(random)
    return builder.to_raw(source_id=source_id)


def ja3_vector_hello() -> ParsedClientHello:
    """Hello whose JA3 string is JA3_VECTOR_STRING."""
    return (
        ClientHelloBuilder(legacy_version=769)
        .ciphers([47, 53, 5, 10, 49161, 49162, 49171, 49172, 50, 56, 19, 4])
        .server_name("example.com")
        .supported_groups([23, 24, 25])
        .ec_point_formats([0])
        .build()
    )


def feature(data: bytes, label: Optional[str] = "A", source_id: str = "") -> FeatureBytes:
    return FeatureBytes(data=data, label=label, source_id=source_id)


# =============================================================================
# CLIENTHELLO FIXTURES
# =============================================================================


@pytest.fixture
def sample_raw_hello() -> RawClientHello:
    """A record-framed hello with SNI, key share and eight cipher suites."""
    return make_raw(source_id="sample:1")


@pytest.fixture
def sample_parsed_hello() -> ParsedClientHello:
    return hello_builder().build()


@pytest.fixture
def ja3_vector() -> ParsedClientHello:
    return ja3_vector_hello()


# =============================================================================
# LABELED DATA FIXTURES
# =============================================================================


@pytest.fixture
def two_class_hellos() -> List[CorpusEntry]:
    """Four browser and four tool hellos differing only in random and SNI."""
    entries = []
    for i in range(4):
        entries.append(
            CorpusEntry(
                raw=make_raw(BROWSER_CIPHERS, host=f"b{i}.example.com", random=bytes([i]) * 32),
                label="browser",
            )
        )
        entries.append(
            CorpusEntry(
                raw=make_raw(TOOL_CIPHERS, host=f"t{i}.example.org", random=bytes([0x80 + i]) * 32),
                label="tool",
            )
        )
    return entries


@pytest.fixture
def two_class_repository(two_class_hellos: List[CorpusEntry]) -> LabelRepository:
    """JA3 repository resolving both classes of two_class_hellos."""
    return repository_from_labeled(
        (parse_client_hello(e.raw), e.label) for e in two_class_hellos if e.label is not None
    )


@pytest.fixture
def synthetic_corpus() -> CorpusFile:
    """Small deterministic synthetic corpus: 4 classes, 80 hellos."""
    return generate_synthetic(default_profiles(4, 80, seed=7), seed=7)


# =============================================================================
# FILE FIXTURES
# =============================================================================


@pytest.fixture
def hexline_file(tmp_path: Path) -> Callable[[Sequence[CorpusEntry], str], Path]:
    """Factory writing entries to a hex-line file under tmp_path."""

    def _write(entries: Sequence[CorpusEntry], name: str = "corpus.hexline") -> Path:
        path = tmp_path / name
        write_hexline(list(entries), path)
        return path

    return _write


@pytest.fixture
def hellogram_env(monkeypatch: pytest.MonkeyPatch) -> None:
    """Clear HELLOGRAM_* variables so tests see the defaults.

    Each variable is set before it is deleted so that teardown also removes
    values a test loads from a .env file.
    """
    for name in (
        "HELLOGRAM_SEED",
        "HELLOGRAM_DELTA",
        "HELLOGRAM_JOBS",
        "HELLOGRAM_CONFIDENCE",
        "HELLOGRAM_MIN_SCORE",
        "HELLOGRAM_LOG_LEVEL",
    ):
        monkeypatch.setenv(name, "")
        monkeypatch.delenv(name)
