"""CLI command for validating run configs."""

import click

from gpderain import api
from gpderain.cli.errors import exit_on_error


@click.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def validate(config_path: str):
    """Validate a run config file and print its resolved blocks.

    Checks:
    - JSON/YAML syntax
    - `extends` chain (missing parents, cycles)
    - Unknown keys and value ranges in every block

    Examples:

        gpderain validate --config configs/desk.yaml
    """
    with exit_on_error("Validation"):
        run = api.from_config(config_path)
        model, train, synth = run.model, run.train, run.synth

        click.echo(f"✓ Config '{run.name}' is valid")
        click.echo(
            f"  Model: crop {model.crop}, latent {model.latent_rows}x{model.latent_dim} "
            f"(tap: {model.latent_tap})"
        )
        click.echo(
            f"  Train: {train.epochs} epochs, batch {train.batch}, lr {train.lr}, "
            f"gp_mode {train.gp_mode}, kernel {train.kernel}, N_n {train.n_neighbors}"
        )
        click.echo(
            f"  Synth: {synth.source.name} {synth.source.rain.orientation_deg:g}deg -> "
            f"{synth.target.name} {synth.target.rain.orientation_deg:g}deg"
        )
        if run.data.labeled:
            click.echo(f"  Labeled: {run.data.labeled}")
        if run.data.unlabeled:
            click.echo(f"  Unlabeled: {run.data.unlabeled}")
        for domain, path in sorted(run.data.eval.items()):
            click.echo(f"  Eval {domain}: {path}")
