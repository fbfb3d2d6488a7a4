"""Unit tests for PSNR and SSIM."""

import numpy as np
import pytest

from gpderain.core.exceptions import ShapeError
from gpderain.objective import PSNR_CAP_DB, psnr, ssim
from gpderain.objective.metrics import SSIM_C1, SSIM_C2
from gpderain.tensor import Tensor


def ssim_brute_force(a, b, window=8):
    a, b = a.mean(axis=0), b.mean(axis=0)
    values = []
    for i in range(a.shape[0] - window + 1):
        for j in range(a.shape[1] - window + 1):
            pa = a[i : i + window, j : j + window].ravel()
            pb = b[i : i + window, j : j + window].ravel()
            ma, mb = pa.mean(), pb.mean()
            cov = np.mean((pa - ma) * (pb - mb))
            values.append(
                (2 * ma * mb + SSIM_C1) * (2 * cov + SSIM_C2)
                / ((ma**2 + mb**2 + SSIM_C1) * (pa.var() + pb.var() + SSIM_C2))
            )
    return float(np.mean(values))


@pytest.mark.unit
class TestPSNR:
    """Tests for psnr()."""

    def test_identical_images_hit_cap(self, rng):
        x = rng.uniform(size=(3, 8, 8))
        assert psnr(x, x) == PSNR_CAP_DB == 100.0

    def test_known_value(self):
        a = np.full((3, 4, 4), 0.5)
        assert psnr(a, a + 0.1) == pytest.approx(20.0)

    def test_accepts_tensors(self):
        a = np.zeros((3, 2, 2))
        assert psnr(Tensor(a), Tensor(a + 0.1)) == pytest.approx(20.0)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            psnr(np.zeros((3, 4, 4)), np.zeros((3, 4, 5)))


@pytest.mark.unit
class TestSSIM:
    """Tests for ssim()."""

    def test_identical_is_one(self, rng):
        x = rng.uniform(size=(3, 12, 12))
        assert ssim(x, x) == pytest.approx(1.0)

    def test_inverted_image_scores_low(self, rng):
        x = rng.uniform(size=(3, 12, 12))
        assert ssim(x, 1.0 - x) < 0.5

    def test_matches_brute_force(self, rng):
        a = rng.uniform(size=(3, 11, 13))
        b = np.clip(a + rng.normal(scale=0.1, size=a.shape), 0, 1)
        assert ssim(a, b) == pytest.approx(ssim_brute_force(a, b), abs=1e-10)

    def test_symmetric(self, rng):
        a, b = rng.uniform(size=(2, 3, 10, 10))
        assert ssim(a, b) == pytest.approx(ssim(b, a))

    def test_grayscale_input(self, rng):
        x = rng.uniform(size=(9, 9))
        assert ssim(x, x) == pytest.approx(1.0)

    def test_smaller_than_window(self):
        with pytest.raises(ShapeError, match="smaller than"):
            ssim(np.zeros((3, 7, 16)), np.zeros((3, 7, 16)))

    def test_bad_rank(self):
        with pytest.raises(ShapeError):
            ssim(np.zeros((1, 3, 8, 8)), np.zeros((1, 3, 8, 8)))
