"""Tests for hellogram."""
