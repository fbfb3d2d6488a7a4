"""CLI commands for gpderain."""
