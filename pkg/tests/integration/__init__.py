"""Integration tests for hellogram."""
