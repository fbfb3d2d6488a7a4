"""Unit tests for rain rendering, image IO and base textures."""

import numpy as np
import pytest

from gpderain.core.exceptions import DataError, ShapeError
from gpderain.models.rain_config import RainParams
from gpderain.rainsynth import (
    estimate_streak_angle,
    expected_mean_residue,
    load_base_images,
    procedural_textures,
    quantize,
    read_png,
    render_rain,
    render_residue,
    write_png,
)


def angle_gap(a, b):
    gap = abs(a - b) % 180.0
    return min(gap, 180.0 - gap)


@pytest.mark.unit
class TestRender:
    """Tests for render_rain / render_residue."""

    def test_deterministic_per_seed(self, rng):
        clean = rng.uniform(size=(3, 32, 32))
        params = RainParams(seed=5)
        a, b = render_rain(clean, params), render_rain(clean, params)
        np.testing.assert_array_equal(a.rainy, b.rainy)
        assert a.n_streaks == b.n_streaks
        c = render_rain(clean, params.model_copy(update={"seed": 6}))
        assert not np.array_equal(a.residue, c.residue)

    def test_density_zero_is_clean(self, rng):
        clean = rng.uniform(size=(3, 16, 16))
        sample = render_rain(clean, RainParams(density=0.0))
        np.testing.assert_array_equal(sample.rainy, clean)
        assert sample.n_streaks == 0

    def test_residue_properties(self, rng):
        clean = rng.uniform(0.0, 0.5, size=(3, 32, 32))
        sample = render_rain(clean, RainParams(density=15.0, seed=2))
        assert sample.residue.min() >= 0.0 and sample.residue.max() <= 1.0
        np.testing.assert_array_equal(sample.residue[0], sample.residue[2])
        np.testing.assert_allclose(sample.rainy, np.clip(clean + sample.residue, 0.0, 1.0))
        assert sample.residue.max() > 0.0

    def test_mean_residue_tracks_first_order_estimate(self):
        params = RainParams(
            density=2.0, length_px=10.0, length_spread=2.0, width_px=1.0, intensity=0.5,
            intensity_spread=0.1,
        )
        means = [
            render_residue(96, 96, params.model_copy(update={"seed": s}))[0].mean() for s in range(8)
        ]
        expected = expected_mean_residue(params)
        assert abs(np.mean(means) - expected) <= 0.2 * expected

    def test_density_increases_coverage(self):
        light = render_residue(48, 48, RainParams(density=2.0, seed=1))[0].mean()
        heavy = render_residue(48, 48, RainParams(density=20.0, seed=1))[0].mean()
        assert heavy > light

    def test_orientation_is_recoverable(self):
        base = dict(density=12.0, orientation_spread=3.0, length_px=24.0, seed=4)
        left = render_residue(64, 64, RainParams(orientation_deg=70.0, **base))[0]
        right = render_residue(64, 64, RainParams(orientation_deg=110.0, **base))[0]
        a_left, a_right = estimate_streak_angle(left), estimate_streak_angle(right)
        assert angle_gap(a_left, 70.0) < 15.0
        assert angle_gap(a_right, 110.0) < 15.0
        assert angle_gap(a_left, a_right) > 20.0

    def test_bad_clean_images(self):
        with pytest.raises(ShapeError):
            render_rain(np.zeros((16, 16)), RainParams())
        with pytest.raises(DataError):
            render_rain(np.full((3, 4, 4), 1.5), RainParams())

    def test_params_validation(self):
        with pytest.raises(ValueError):
            RainParams(length_px=5.0, length_spread=5.0)
        with pytest.raises(ValueError):
            RainParams(width_px=4.0)


@pytest.mark.unit
class TestImageIO:
    """PNG IO and quantization."""

    def test_png_round_trip_of_quantized_image(self, rng, temp_dir):
        image = quantize(rng.uniform(size=(3, 9, 7)))
        path = str(temp_dir / "img.png")
        write_png(path, image)
        np.testing.assert_array_equal(read_png(path), image)

    def test_quantize_idempotent(self, rng):
        once = quantize(rng.uniform(size=(3, 4, 4)))
        np.testing.assert_array_equal(quantize(once), once)
        assert np.all(np.abs(once * 255.0 - np.round(once * 255.0)) < 1e-9)

    def test_write_clips(self, temp_dir):
        path = str(temp_dir / "clip.png")
        write_png(path, np.full((3, 2, 2), 1.7))
        np.testing.assert_array_equal(read_png(path), 1.0)

    def test_missing_and_corrupt(self, temp_dir):
        with pytest.raises(DataError):
            read_png(str(temp_dir / "absent.png"))
        junk = temp_dir / "junk.png"
        junk.write_bytes(b"not a png")
        with pytest.raises(DataError, match="Not a readable image"):
            read_png(str(junk))

    def test_wrong_layout(self, temp_dir):
        with pytest.raises(ShapeError):
            write_png(str(temp_dir / "x.png"), np.zeros((4, 4, 3)))


@pytest.mark.unit
class TestTextures:
    """Procedural and on-disk base images."""

    def test_procedural_textures(self):
        images = procedural_textures(3, 20, seed=0)
        assert len(images) == 3
        for image in images:
            assert image.shape == (3, 20, 20)
            assert image.min() >= 0.0 and image.max() <= 1.0
            assert image.std() > 0.0
        again = procedural_textures(3, 20, seed=0)
        np.testing.assert_array_equal(images[1], again[1])

    def test_load_base_images_sorted(self, temp_dir, base_images):
        folder = temp_dir / "base"
        for name, image in zip(["b.png", "a.png"], base_images[:2]):
            write_png(str(folder / name), image)
        loaded = load_base_images(str(folder))
        np.testing.assert_array_equal(loaded[0], quantize(base_images[1]))

    def test_load_base_images_empty(self, temp_dir):
        (temp_dir / "empty").mkdir()
        with pytest.raises(DataError, match="No PNG"):
            load_base_images(str(temp_dir / "empty"))
