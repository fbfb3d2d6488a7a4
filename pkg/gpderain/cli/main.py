"""Main CLI entry point for gpderain."""

import click

from gpderain import __version__
from gpderain.cli.commands.derain import derain
from gpderain.cli.commands.eval import eval_checkpoint
from gpderain.cli.commands.gp_inspect import gp_inspect
from gpderain.cli.commands.init import init
from gpderain.cli.commands.synth import synth
from gpderain.cli.commands.train import train
from gpderain.cli.commands.validate import validate
from gpderain.core.logging import LOG_LEVEL_ENV, configure_logging


@click.group()
@click.version_option(version=__version__)
@click.option(
    "--log-level",
    default="INFO",
    envvar=LOG_LEVEL_ENV,
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False),
    help=f"Log level (default: INFO, env: {LOG_LEVEL_ENV})",
)
@click.option("--json-logs", is_flag=True, help="Use JSON format for logs")
def main(log_level: str, json_logs: bool):
    """gpderain - GP-based semi-supervised image deraining."""
    configure_logging(level=log_level, json_format=json_logs)


# Register commands
main.add_command(synth)
main.add_command(train)
main.add_command(eval_checkpoint)
main.add_command(derain)
main.add_command(gp_inspect)
main.add_command(init)
main.add_command(validate)


if __name__ == "__main__":
    main()
