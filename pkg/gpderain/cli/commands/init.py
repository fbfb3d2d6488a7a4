"""CLI command for writing an initial checkpoint."""

from typing import Optional

import click

from gpderain import api
from gpderain.cli.errors import exit_on_error


@click.command()
@click.option("--out", "path", required=True, type=click.Path(), help="Checkpoint file to write")
@click.option("--config", "config_path", type=click.Path(exists=True), help="Run config file")
@click.option("--seed", type=int, help="Init seed (default: the config's train.seed)")
@click.option(
    "--identity",
    is_flag=True,
    help="Zero the output layer so the network returns its input unchanged",
)
def init(path: str, config_path: Optional[str], seed: Optional[int], identity: bool):
    """Write a seeded or zero-residue identity checkpoint.

    Examples:

        gpderain init --out identity.arrow --identity
        gpderain init --config configs/desk.yaml --out init.arrow --seed 3
    """
    with exit_on_error("Init"):
        run = api.from_config(config_path)
        seed = run.train.seed if seed is None else seed
        api.write_initial_checkpoint(run.model, path, seed=seed, identity=identity)
        kind = "identity" if identity else f"seeded (seed={seed})"
        click.echo(f"Created {kind} checkpoint: {path}")
