"""CLI command for training."""

from typing import Optional

import click

from gpderain import api
from gpderain.cli.errors import exit_on_error
from gpderain.core.logging import configure_logging
from gpderain.models.merger import overrides_from_flags


@click.command()
@click.option("--config", "config_path", type=click.Path(exists=True), help="Run config file")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory")
@click.option(
    "--gp-mode",
    type=click.Choice(["off", "syn2real", "syn2real++"]),
    help="Unlabeled phase: off, whole-latent (syn2real) or per-feature-map (syn2real++)",
)
@click.option("--kernel", type=click.Choice(["lin", "se", "rq"]), help="GP kernel")
@click.option("--nn", "n_neighbors", type=int, help="Nearest neighbours per pseudo label")
@click.option("--seed", type=int, help="Run seed")
@click.option("--epochs", type=int, help="Number of epochs")
@click.option("--lambda-unsup", type=float, help="Weight of the unsupervised loss")
@click.option("--unlabeled-ratio", type=int, help="Unlabeled steps per labeled step")
@click.option("--init", "init_from", type=click.Path(exists=True), help="Start from a checkpoint")
@click.pass_context
def train(
    ctx: click.Context,
    config_path: Optional[str],
    out_dir: str,
    gp_mode: Optional[str],
    kernel: Optional[str],
    n_neighbors: Optional[int],
    seed: Optional[int],
    epochs: Optional[int],
    lambda_unsup: Optional[float],
    unlabeled_ratio: Optional[int],
    init_from: Optional[str],
):
    """Train a deraining network; flags override config values.

    Examples:

        gpderain train --config data/resolved_config.json --out runs/ssl
        gpderain train --config data/resolved_config.json --out runs/sup --gp-mode off
        gpderain train --config data/resolved_config.json --out runs/se --kernel se --nn 16
    """
    with exit_on_error("Training"):
        overrides = overrides_from_flags(
            **{
                "train.gp_mode": gp_mode,
                "train.kernel": kernel,
                "train.n_neighbors": n_neighbors,
                "train.seed": seed,
                "train.epochs": epochs,
                "train.lambda_unsup": lambda_unsup,
                "train.unlabeled_ratio": unlabeled_ratio,
            }
        )
        run = api.from_config(config_path, overrides=overrides)

        parent = ctx.parent.params if ctx.parent else {}
        configure_logging(
            level=parent.get("log_level", "INFO"),
            json_format=parent.get("json_logs", False),
            run_name=run.name,
        )

        click.echo(f"Training run: {run.name} (gp_mode={run.train.gp_mode})")
        _, runlog = api.train(run, out_dir, init_from=init_from)
        click.echo(runlog.get_summary())
        click.echo(f"Checkpoint: {out_dir}/checkpoint.arrow")
