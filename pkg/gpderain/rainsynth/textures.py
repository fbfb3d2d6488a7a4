"""Procedural clean base images, so synthesis needs no external dataset."""

import logging

import numpy as np
from scipy.ndimage import gaussian_filter

from gpderain.core import storage
from gpderain.core.exceptions import DataError
from gpderain.rainsynth.imageio import read_png

logger = logging.getLogger(__name__)


def procedural_texture(size: int, rng: np.random.Generator) -> np.ndarray:
    """One [3, size, size] image: a colour gradient, smooth noise and a few shapes."""
    ys, xs = np.mgrid[0:size, 0:size] / max(size - 1, 1)

    start, end = rng.uniform(0.1, 0.9, size=(2, 3))
    direction = rng.uniform(0, 2 * np.pi)
    t = (np.cos(direction) * xs + np.sin(direction) * ys + 1.0) / 2.0
    image = start[:, None, None] * (1 - t) + end[:, None, None] * t

    noise = gaussian_filter(rng.normal(size=(size, size)), sigma=size / 16.0)
    noise /= np.abs(noise).max() + 1e-12
    image = image + 0.15 * noise[None] * rng.uniform(0.5, 1.0, size=(3, 1, 1))

    for _ in range(int(rng.integers(2, 6))):
        colour = rng.uniform(0.0, 1.0, size=3)[:, None, None]
        cx, cy = rng.uniform(0, 1, size=2)
        radius = rng.uniform(0.05, 0.3)
        if rng.random() < 0.5:
            mask = (xs - cx) ** 2 + (ys - cy) ** 2 <= radius**2
        else:
            mask = (np.abs(xs - cx) <= radius) & (np.abs(ys - cy) <= radius * rng.uniform(0.3, 1.0))
        image = np.where(mask[None], 0.6 * colour + 0.4 * image, image)

    return np.clip(image, 0.0, 1.0)


def procedural_textures(n: int, size: int, seed: int) -> list[np.ndarray]:
    """n seeded procedural images of side `size`."""
    rng = np.random.default_rng(seed)
    return [procedural_texture(size, rng) for _ in range(n)]


def load_base_images(directory: str) -> list[np.ndarray]:
    """Read every PNG in a directory, sorted by path.

    Raises:
        DataError: If the directory holds no PNG files
    """
    paths = storage.list_files(directory, ".png")
    if not paths:
        raise DataError(f"No PNG base images found in {directory}", context={"path": directory})
    logger.info("Loaded base images", extra={"count": len(paths), "path": directory})
    return [read_png(p) for p in paths]
