"""Tests package for gpderain."""
