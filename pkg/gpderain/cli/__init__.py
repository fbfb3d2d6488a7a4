"""CLI interface for gpderain."""
