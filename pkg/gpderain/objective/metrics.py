"""Full-reference image quality metrics on [0, 1] images."""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from gpderain.core.exceptions import ShapeError
from gpderain.tensor import Tensor

PSNR_CAP_DB = 100.0
SSIM_WINDOW = 8
SSIM_C1 = 0.01**2
SSIM_C2 = 0.03**2


def _as_array(image) -> np.ndarray:
    return image.data if isinstance(image, Tensor) else np.asarray(image, dtype=np.float64)


def psnr(y_pred, y) -> float:
    """10 log10(1 / MSE) in dB, capped at 100 dB (MSE = 0 gives the cap)."""
    a, b = _as_array(y_pred), _as_array(y)
    if a.shape != b.shape:
        raise ShapeError("psnr inputs differ in shape", context={"a": a.shape, "b": b.shape})
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(PSNR_CAP_DB, 10.0 * np.log10(1.0 / mse))


def _grayscale(image: np.ndarray) -> np.ndarray:
    if image.ndim == 3:
        return image.mean(axis=0)
    if image.ndim == 2:
        return image
    raise ShapeError("ssim expects [C, H, W] or [H, W] images", context={"shape": image.shape})


def ssim(y_pred, y, window: int = SSIM_WINDOW) -> float:
    """Mean structural similarity over all window x window patches.

    Channels are averaged to grayscale first; local statistics are uniform
    (population) moments over each patch with C1 = 0.01^2, C2 = 0.03^2.

    Raises:
        ShapeError: If shapes differ or the image is smaller than the window
    """
    a, b = _grayscale(_as_array(y_pred)), _grayscale(_as_array(y))
    if a.shape != b.shape:
        raise ShapeError("ssim inputs differ in shape", context={"a": a.shape, "b": b.shape})
    if a.shape[0] < window or a.shape[1] < window:
        raise ShapeError(
            f"image {a.shape} is smaller than the {window}x{window} ssim window",
            context={"shape": a.shape, "window": window},
        )

    wa = sliding_window_view(a, (window, window))
    wb = sliding_window_view(b, (window, window))
    mu_a, mu_b = wa.mean(axis=(-2, -1)), wb.mean(axis=(-2, -1))
    var_a = wa.var(axis=(-2, -1))
    var_b = wb.var(axis=(-2, -1))
    cov = (wa * wb).mean(axis=(-2, -1)) - mu_a * mu_b

    numerator = (2 * mu_a * mu_b + SSIM_C1) * (2 * cov + SSIM_C2)
    denominator = (mu_a**2 + mu_b**2 + SSIM_C1) * (var_a + var_b + SSIM_C2)
    return float(np.mean(numerator / denominator))
