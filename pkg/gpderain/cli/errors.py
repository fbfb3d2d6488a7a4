"""Exit-code mapping shared by all commands."""

import sys
from contextlib import contextmanager
from typing import Iterator

import click

from gpderain.core.exceptions import ConfigError, GPDerainError

EXIT_INTERNAL = 1
EXIT_USAGE = 2


@contextmanager
def exit_on_error(action: str) -> Iterator[None]:
    """Print a diagnostic and exit 2 on config errors, 1 on anything else."""
    try:
        yield
    except ConfigError as e:
        click.echo(f"Config error: {e}", err=True)
        sys.exit(EXIT_USAGE)
    except GPDerainError as e:
        click.echo(f"{action} failed: {e}", err=True)
        sys.exit(EXIT_INTERNAL)
    except Exception as e:
        click.echo(f"Unexpected error: {e}", err=True)
        sys.exit(EXIT_INTERNAL)
