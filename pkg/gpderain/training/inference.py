"""Full-image inference by overlapping tiles."""

import numpy as np

from gpderain.core.exceptions import ShapeError
from gpderain.model.network import DerainNet
from gpderain.tensor import no_grad


def _tile_starts(size: int, crop: int) -> list[int]:
    """Tile origins at stride crop/2, the last one flush with the border."""
    if size <= crop:
        return [0]
    stride = max(crop // 2, 1)
    starts = list(range(0, size - crop, stride))
    starts.append(size - crop)
    return starts


def _tent(crop: int) -> np.ndarray:
    """Strictly positive linear ramp peaking at the tile centre."""
    ramp = np.minimum(np.arange(1, crop + 1), np.arange(crop, 0, -1)).astype(np.float64)
    return ramp / ramp.max()


def tiled_derain(net: DerainNet, image: np.ndarray, batch: int = 8) -> np.ndarray:
    """Derain a [3, H, W] image of any size with crop-sized tiles.

    An image of exactly crop size is one tile. Smaller images are reflect-
    padded up to crop. Larger ones use tiles at 50% overlap, blended with
    separable tent weights. The output is not clamped.

    Args:
        net: Network
        image: Rainy image [3, H, W]
        batch: Tiles per forward pass

    Returns:
        Derained image [3, H, W]
    """
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3 or image.shape[0] != 3:
        raise ShapeError("images must be [3, H, W]", context={"shape": image.shape})
    crop = net.config.crop
    _, height, width = image.shape

    with no_grad():
        if height == crop and width == crop:
            return net.derain(image[None]).data[0]

        pad_h, pad_w = max(crop - height, 0), max(crop - width, 0)
        padded = image
        if pad_h or pad_w:
            padded = np.pad(image, ((0, 0), (0, pad_h), (0, pad_w)), mode="reflect")
        _, ph, pw = padded.shape

        tiles = [(top, left) for top in _tile_starts(ph, crop) for left in _tile_starts(pw, crop)]
        weight = np.outer(_tent(crop), _tent(crop))
        accumulated = np.zeros_like(padded)
        norm = np.zeros((ph, pw))
        for start in range(0, len(tiles), batch):
            group = tiles[start : start + batch]
            x = np.stack([padded[:, t : t + crop, l : l + crop] for t, l in group])
            out = net.derain(x).data
            for (t, l), tile in zip(group, out):
                accumulated[:, t : t + crop, l : l + crop] += weight * tile
                norm[t : t + crop, l : l + crop] += weight

    return (accumulated / norm)[:, :height, :width]
