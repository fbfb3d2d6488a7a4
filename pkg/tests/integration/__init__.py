"""Integration tests for gpderain."""
