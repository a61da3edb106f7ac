"""Command-line entry point."""

from hellogram.cli.main import cli, main

__all__ = ["cli", "main"]
