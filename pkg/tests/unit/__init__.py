"""Unit tests for gpderain."""
