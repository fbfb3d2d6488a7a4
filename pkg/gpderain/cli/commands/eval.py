"""CLI command for evaluating a checkpoint."""

from typing import Optional

import click

from gpderain import api
from gpderain.cli.errors import exit_on_error


@click.command("eval")
@click.option("--checkpoint", required=True, type=click.Path(exists=True), help="Checkpoint file")
@click.option("--manifest", required=True, type=click.Path(exists=True), help="Labeled manifest")
@click.option("--out", "out_dir", type=click.Path(), help="Directory for report.json and samples")
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True),
    help="Build the model block of this config instead of the checkpoint's",
)
@click.option("--samples", default=0, type=int, help="Sample triplets to write (default: 0)")
@click.option("--workers", default=1, type=int, help="Images evaluated in parallel (default: 1)")
def eval_checkpoint(
    checkpoint: str,
    manifest: str,
    out_dir: Optional[str],
    config_path: Optional[str],
    samples: int,
    workers: int,
):
    """Score a checkpoint with PSNR/SSIM on a labeled manifest.

    Examples:

        gpderain eval --checkpoint runs/ssl/checkpoint.arrow --manifest data/target/test/manifest.json --out reports/
    """
    with exit_on_error("Evaluation"):
        model = api.from_config(config_path).model if config_path else None
        report = api.evaluate_checkpoint(
            checkpoint, manifest, out_dir=out_dir, model=model, samples=samples, workers=workers
        )
        summary = report.summary()
        click.echo(f"{'domain':<12} {'images':>6} {'skipped':>7} {'PSNR':>8} {'SSIM':>7}")
        click.echo(
            f"{summary['domain']:<12} {summary['images']:>6} {summary['skipped']:>7} "
            f"{summary['psnr']:>8.2f} {summary['ssim']:>7.4f}"
        )
        if out_dir:
            click.echo(f"Report: {out_dir}/{api.EVAL_REPORT_NAME}")
