"""Additive rain-streak rendering: rainy = clip(clean + residue)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from gpderain.core.exceptions import DataError, ShapeError
from gpderain.models.rain_config import RainParams

# Minimum along-streak smoothing (pixels) so streak ends are anti-aliased
_MIN_BLUR = 0.5


@dataclass(frozen=True)
class RainSample:
    """One rendered image: rainy = clip(clean + residue, 0, 1)."""

    rainy: np.ndarray
    residue: np.ndarray
    n_streaks: int


def _streak_layer(
    height: int,
    width: int,
    center: tuple[float, float],
    angle_deg: float,
    length: float,
    stroke_width: float,
    intensity: float,
    blur: float,
) -> tuple[tuple[slice, slice], np.ndarray]:
    """Render one streak into its bounding box.

    The cross-section is a Gaussian whose integral equals `stroke_width`; the
    along-streak profile is a box of `length` blurred by a Gaussian of sigma
    `blur`. Peak value is `intensity`.
    """
    theta = np.deg2rad(angle_deg)
    # y grows downwards, so a counter-clockwise angle moves up the image
    ux, uy = np.cos(theta), -np.sin(theta)
    cross_sigma = stroke_width / np.sqrt(2.0 * np.pi)
    along_sigma = np.hypot(blur, _MIN_BLUR)

    reach = length / 2.0 + 4.0 * along_sigma
    pad = 4.0 * cross_sigma + 1.0
    half_w = abs(ux) * reach + pad
    half_h = abs(uy) * reach + pad
    cx, cy = center
    x0, x1 = max(int(np.floor(cx - half_w)), 0), min(int(np.ceil(cx + half_w)) + 1, width)
    y0, y1 = max(int(np.floor(cy - half_h)), 0), min(int(np.ceil(cy + half_h)) + 1, height)
    if x0 >= x1 or y0 >= y1:
        return (slice(0, 0), slice(0, 0)), np.zeros((0, 0))

    ys, xs = np.mgrid[y0:y1, x0:x1].astype(np.float64)
    dx, dy = xs - cx, ys - cy
    along = dx * ux + dy * uy
    across = -dx * uy + dy * ux

    cross = np.exp(-(across**2) / (2.0 * cross_sigma**2))
    scale = np.sqrt(2.0) * along_sigma
    box = 0.5 * (erf((along + length / 2.0) / scale) - erf((along - length / 2.0) / scale))
    return (slice(y0, y1), slice(x0, x1)), intensity * cross * box


def render_residue(height: int, width: int, params: RainParams) -> tuple[np.ndarray, int]:
    """Render a [H, W] streak layer in [0, 1] from params (seeded by params.seed).

    Streak count is Poisson with mean density * area / 1000, taken over an
    area extended by the streak reach on every side so that coverage stays
    uniform up to the borders. Overlapping streaks combine by screen blending.
    """
    residue = np.zeros((height, width))
    if params.density == 0:
        return residue, 0

    rng = np.random.default_rng(params.seed)
    margin = params.length_px + params.length_spread + 4.0 * (params.blur_sigma + 1.0)
    ext_w, ext_h = width + 2 * margin, height + 2 * margin
    count = int(rng.poisson(params.density * ext_w * ext_h / 1000.0))

    centers_x = rng.uniform(-margin, width + margin, size=count)
    centers_y = rng.uniform(-margin, height + margin, size=count)
    angles = rng.uniform(
        params.orientation_deg - params.orientation_spread,
        params.orientation_deg + params.orientation_spread,
        size=count,
    )
    lengths = rng.uniform(
        params.length_px - params.length_spread, params.length_px + params.length_spread, size=count
    )
    intensities = np.clip(
        rng.uniform(
            params.intensity - params.intensity_spread,
            params.intensity + params.intensity_spread,
            size=count,
        ),
        0.0,
        1.0,
    )

    transmitted = np.ones((height, width))
    for i in range(count):
        box, layer = _streak_layer(
            height,
            width,
            (centers_x[i], centers_y[i]),
            angles[i],
            lengths[i],
            params.width_px,
            intensities[i],
            params.blur_sigma,
        )
        if layer.size:
            transmitted[box] *= 1.0 - layer
    residue = 1.0 - transmitted
    return residue, count


def render_rain(clean: np.ndarray, params: RainParams) -> RainSample:
    """Add rain to a clean [3, H, W] image in [0, 1].

    The residue is the same for all channels (white rain) and is never
    negative; density 0 yields an all-zero residue.

    Args:
        clean: Clean image [3, H, W] in [0, 1]
        params: Rain parameters, including the seed

    Returns:
        RainSample with rainy = clip(clean + residue, 0, 1)

    Raises:
        ShapeError: If clean is not [3, H, W]
        DataError: If clean has values outside [0, 1]
    """
    clean = np.asarray(clean, dtype=np.float64)
    if clean.ndim != 3 or clean.shape[0] != 3:
        raise ShapeError("clean image must be [3, H, W]", context={"shape": clean.shape})
    if clean.min() < 0.0 or clean.max() > 1.0:
        raise DataError(
            "clean image must lie in [0, 1]",
            context={"min": float(clean.min()), "max": float(clean.max())},
        )
    layer, count = render_residue(clean.shape[1], clean.shape[2], params)
    residue = np.broadcast_to(layer, clean.shape).copy()
    rainy = np.clip(clean + residue, 0.0, 1.0)
    return RainSample(rainy=rainy, residue=residue, n_streaks=count)


def expected_mean_residue(params: RainParams) -> float:
    """First-order mean residue: density * length * width * intensity / 1000.

    Ignores overlap between streaks, so it slightly overestimates dense rain.
    """
    return params.density * params.length_px * params.width_px * params.intensity / 1000.0


def estimate_streak_angle(residue: np.ndarray) -> float:
    """Dominant streak orientation in degrees, in [0, 180).

    Uses the image structure tensor: the dominant gradient orientation is
    perpendicular to the streaks.

    Args:
        residue: [H, W] or [C, H, W] residue (channels are averaged)

    Returns:
        Angle counter-clockwise from the x axis
    """
    residue = np.asarray(residue, dtype=np.float64)
    if residue.ndim == 3:
        residue = residue.mean(axis=0)
    gy, gx = np.gradient(residue)
    jxx, jyy, jxy = np.sum(gx * gx), np.sum(gy * gy), np.sum(gx * gy)
    gradient_deg = 0.5 * np.degrees(np.arctan2(2.0 * jxy, jxx - jyy))
    return float((90.0 - gradient_deg) % 180.0)
