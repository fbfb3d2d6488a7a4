"""CLI command for inspecting the GP pseudo-label of one image."""

import json
from typing import Optional

import click

from gpderain import api
from gpderain.cli.errors import exit_on_error


@click.command("gp-inspect")
@click.option("--checkpoint", required=True, type=click.Path(exists=True), help="Checkpoint file")
@click.option("--bank", "bank_path", required=True, type=click.Path(exists=True), help="Bank dump")
@click.option("--in", "image_in", required=True, type=click.Path(exists=True), help="Rainy PNG")
@click.option(
    "--gp-mode",
    type=click.Choice(["syn2real", "syn2real++"]),
    help="Expected bank mode; an error if the dump was built in the other one",
)
@click.option("--nn", "n_neighbors", default=32, type=int, help="Neighbours (capped at bank size)")
@click.option("--sigma-eps2", default=1.0, type=float, help="Noise variance (default: 1.0)")
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON")
def gp_inspect(
    checkpoint: str,
    bank_path: str,
    image_in: str,
    gp_mode: Optional[str],
    n_neighbors: int,
    sigma_eps2: float,
    as_json: bool,
):
    """Show neighbours, weights, covariance spectrum and unsup loss for one image.

    Examples:

        gpderain gp-inspect --checkpoint runs/ssl/checkpoint.arrow --bank runs/ssl/bank.arrow --in rainy.png
    """
    with exit_on_error("GP inspection"):
        report = api.inspect_gp(
            checkpoint,
            bank_path,
            image_in,
            gp_mode=gp_mode,
            n_neighbors=n_neighbors,
            sigma_eps2=sigma_eps2,
        )
        if as_json:
            click.echo(json.dumps(report.to_dict(), indent=2))
            return

        click.echo(f"Mode: {report.mode}  Kernel: {report.kernel['kind']}")
        click.echo("Neighbours:")
        for rank, (image_id, score) in enumerate(zip(report.neighbor_ids, report.scores)):
            weight = f"  alpha={report.alpha[rank]:+.6f}" if report.alpha is not None else ""
            click.echo(f"  {rank + 1:>3}. {image_id}  score={score:.6f}{weight}")
        if report.mu_reconstruction_error is not None:
            click.echo(f"Weighted-sum deviation from mu: {report.mu_reconstruction_error:.3e}")
        click.echo(
            f"Sigma eigenvalues: [{report.sigma_eig_min:.6f}, {report.sigma_eig_max:.6f}]"
        )
        click.echo(f"Unsup loss: {report.unsup_loss:.6f}")
