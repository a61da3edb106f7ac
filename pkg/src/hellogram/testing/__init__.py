"""Testing utilities for hellogram."""

from hellogram.testing.fixtures import (
    BROWSER_CIPHERS,
    JA3_VECTOR_HASH,
    JA3_VECTOR_STRING,
    TOOL_CIPHERS,
    feature,
    hello_builder,
    hellogram_env,
    hexline_file,
    ja3_vector,
    ja3_vector_hello,
    make_raw,
    sample_parsed_hello,
    sample_raw_hello,
    synthetic_corpus,
    two_class_hellos,
    two_class_repository,
)
from hellogram.testing.pcap import LINKTYPE_ETHERNET, LINKTYPE_RAW, tcp_frame, write_pcap

__all__ = [
    # Builders
    "BROWSER_CIPHERS",
    "TOOL_CIPHERS",
    "JA3_VECTOR_STRING",
    "JA3_VECTOR_HASH",
    "hello_builder",
    "make_raw",
    "ja3_vector_hello",
    "feature",
    # Fixtures
    "sample_raw_hello",
    "sample_parsed_hello",
    "ja3_vector",
    "two_class_hellos",
    "two_class_repository",
    "synthetic_corpus",
    "hexline_file",
    "hellogram_env",
    # pcap
    "LINKTYPE_ETHERNET",
    "LINKTYPE_RAW",
    "tcp_frame",
    "write_pcap",
]
