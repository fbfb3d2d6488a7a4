"""CLI command for synthesizing rain domains."""

from typing import Optional

import click

from gpderain import api
from gpderain.cli.errors import exit_on_error
from gpderain.core import storage


@click.command()
@click.option("--config", "config_path", type=click.Path(exists=True), help="Run config file")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory")
def synth(config_path: Optional[str], out_dir: str):
    """Render source/target rain domains and write their manifests.

    Examples:

        gpderain synth --out data/
        gpderain synth --config configs/desk.yaml --out data/
    """
    with exit_on_error("Synthesis"):
        run = api.from_config(config_path)
        paths = api.synthesize(run, out_dir)
        report = storage.read_json(f"{out_dir}/{api.SYNTH_REPORT_NAME}")

        for key, path in paths.items():
            click.echo(f"{key}: {path}")
        for key, stats in report.items():
            click.echo(f"  {key} input PSNR: {stats['input_psnr']:.2f} dB")
        click.echo(f"Resolved config: {out_dir}/{api.RESOLVED_CONFIG_NAME}")
