"""Synthetic rain: streak rendering, base textures, domains and manifests."""

from gpderain.rainsynth.domain import MANIFEST_NAME, make_domain, random_crop
from gpderain.rainsynth.imageio import quantize, read_png, write_png
from gpderain.rainsynth.manifest import DatasetManifest, ManifestRecord
from gpderain.rainsynth.render import (
    RainSample,
    estimate_streak_angle,
    expected_mean_residue,
    render_rain,
    render_residue,
)
from gpderain.rainsynth.textures import load_base_images, procedural_textures

__all__ = [
    "DatasetManifest",
    "MANIFEST_NAME",
    "ManifestRecord",
    "RainSample",
    "estimate_streak_angle",
    "expected_mean_residue",
    "load_base_images",
    "make_domain",
    "procedural_textures",
    "quantize",
    "random_crop",
    "read_png",
    "render_rain",
    "render_residue",
    "write_png",
]
