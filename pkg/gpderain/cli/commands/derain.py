"""CLI command for deraining a single image."""

import click

from gpderain import api
from gpderain.cli.errors import exit_on_error


@click.command()
@click.option("--checkpoint", required=True, type=click.Path(exists=True), help="Checkpoint file")
@click.option("--in", "image_in", required=True, type=click.Path(exists=True), help="Rainy PNG")
@click.option("--out", "image_out", required=True, type=click.Path(), help="Derained PNG")
def derain(checkpoint: str, image_in: str, image_out: str):
    """Derain one PNG of any size.

    Examples:

        gpderain derain --checkpoint runs/ssl/checkpoint.arrow --in rainy.png --out clean.png
    """
    with exit_on_error("Derain"):
        api.derain_image(checkpoint, image_in, image_out)
        click.echo(f"Wrote {image_out}")
