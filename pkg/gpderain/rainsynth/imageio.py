"""PNG read/write for [3, H, W] float images in [0, 1]."""

import io

import numpy as np
from PIL import Image, UnidentifiedImageError

from gpderain.core import storage
from gpderain.core.exceptions import CheckpointError, DataError, ShapeError


def to_uint8(image: np.ndarray) -> np.ndarray:
    """Quantize a [3, H, W] float image to [H, W, 3] uint8 (round half to even)."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3 or image.shape[0] != 3:
        raise ShapeError("images must be [3, H, W]", context={"shape": image.shape})
    return np.round(np.clip(image, 0.0, 1.0) * 255.0).astype(np.uint8).transpose(1, 2, 0)


def from_uint8(pixels: np.ndarray) -> np.ndarray:
    return pixels.astype(np.float64).transpose(2, 0, 1) / 255.0


def quantize(image: np.ndarray) -> np.ndarray:
    """Round-trip through 8 bits, so the array equals what a PNG stores."""
    return from_uint8(to_uint8(image))


def read_png(path: str) -> np.ndarray:
    """Read an image as RGB [3, H, W] float64 in [0, 1].

    Raises:
        DataError: If the file is missing or not a readable image
    """
    try:
        raw = storage.read_bytes(path)
    except CheckpointError as e:
        raise DataError(f"Cannot read image {path}", context={"path": str(path)}) from e
    try:
        with Image.open(io.BytesIO(raw)) as img:
            pixels = np.asarray(img.convert("RGB"))
    except (UnidentifiedImageError, OSError) as e:
        raise DataError(f"Not a readable image: {path}", context={"path": str(path)}) from e
    return from_uint8(pixels)


def write_png(path: str, image: np.ndarray) -> None:
    """Write a [3, H, W] image (clipped to [0, 1]) as 8-bit RGB PNG."""
    buffer = io.BytesIO()
    Image.fromarray(to_uint8(image)).save(buffer, format="PNG")
    storage.atomic_write_bytes(path, buffer.getvalue())
