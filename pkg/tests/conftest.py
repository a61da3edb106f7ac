"""
Pytest configuration for hellogram tests.

Imports all fixtures from the package's testing module to make them
available to the test suite.
"""

# Import all fixtures from the package
from hellogram.testing import (
    hellogram_env,
    hexline_file,
    ja3_vector,
    sample_parsed_hello,
    sample_raw_hello,
    synthetic_corpus,
    two_class_hellos,
    two_class_repository,
)

# Make fixtures available to tests
__all__ = [
    "hellogram_env",
    "hexline_file",
    "ja3_vector",
    "sample_parsed_hello",
    "sample_raw_hello",
    "synthetic_corpus",
    "two_class_hellos",
    "two_class_repository",
]
