"""Unit tests for manifest datasets and crops."""

from pathlib import Path

import numpy as np
import pytest

from gpderain.core.exceptions import DataError
from gpderain.models.rain_config import RainParams
from gpderain.rainsynth import make_domain
from gpderain.training import CenterCropped, ManifestDataset, center_crop


@pytest.fixture
def wide_domain(temp_dir, base_images):
    """Five labeled 24 x 24 records, larger than the 16 px training crop."""
    params = RainParams(density=12.0, length_px=6.0, length_spread=2.0, seed=21)
    return make_domain(base_images, params, 5, str(temp_dir / "wide"), True, image_size=24)


@pytest.mark.unit
class TestManifestDataset:
    """Tests for ManifestDataset."""

    def test_loads_every_record(self, wide_domain):
        dataset = ManifestDataset(wide_domain, require_clean=True)
        assert len(dataset) == 5
        assert dataset.labeled
        assert dataset.rainy(0).shape == (3, 24, 24)
        assert dataset.image_id(4) == wide_domain.records[4].id

    def test_batches_cover_one_pass(self, wide_domain):
        dataset = ManifestDataset(wide_domain)
        batches = list(dataset.batches(np.random.default_rng(0), batch_size=2, crop=16))
        assert [len(ids) for ids, _, _ in batches] == [2, 2, 1]
        assert sorted(i for ids, _, _ in batches for i in ids) == sorted(dataset.ids)
        assert batches[0][1].shape == (2, 3, 16, 16)

    def test_paired_crops_share_window(self, wide_domain):
        """Rain only brightens, so a shared window keeps rainy >= clean everywhere."""
        dataset = ManifestDataset(wide_domain)
        for _, x, y in dataset.batches(np.random.default_rng(5), batch_size=5, crop=16):
            assert np.all(x >= y)

    def test_batches_are_seeded(self, wide_domain):
        dataset = ManifestDataset(wide_domain)
        first = list(dataset.batches(np.random.default_rng(3), 2, 16))
        second = list(dataset.batches(np.random.default_rng(3), 2, 16))
        for (ids_a, x_a, _), (ids_b, x_b, _) in zip(first, second):
            assert ids_a == ids_b
            np.testing.assert_array_equal(x_a, x_b)

    def test_endless_batches_repeat(self, wide_domain):
        stream = ManifestDataset(wide_domain).endless_batches(np.random.default_rng(0), 4, 16)
        sizes = [len(next(stream)[0]) for _ in range(4)]
        assert sizes == [4, 1, 4, 1]

    def test_unlabeled(self, tiny_domains):
        dataset = ManifestDataset(tiny_domains["target_train"])
        assert not dataset.labeled
        with pytest.raises(DataError, match="unlabeled"):
            dataset.clean(0)
        _, _, y = next(dataset.batches(np.random.default_rng(0), 2, 16))
        assert y is None

    def test_require_clean(self, tiny_domains):
        with pytest.raises(DataError, match="no clean images"):
            ManifestDataset(tiny_domains["target_train"], require_clean=True)

    def test_missing_file(self, wide_domain):
        Path(wide_domain.resolve(wide_domain.records[2].clean)).unlink()
        with pytest.raises(DataError, match="missing files"):
            ManifestDataset(wide_domain)


@pytest.mark.unit
class TestCenterCrop:
    """Tests for center_crop and CenterCropped."""

    def test_central_window(self):
        image = np.arange(3 * 6 * 6, dtype=float).reshape(3, 6, 6)
        np.testing.assert_array_equal(center_crop(image, 2), image[:, 2:4, 2:4])

    def test_pads_small_images(self, rng):
        image = rng.uniform(size=(3, 4, 6))
        crop = center_crop(image, 6)
        assert crop.shape == (3, 6, 6)
        np.testing.assert_array_equal(crop[:, :4], image)

    def test_view(self, wide_domain):
        view = CenterCropped(ManifestDataset(wide_domain), 16)
        assert len(view) == 5
        assert view.image_id(1) == wide_domain.records[1].id
        assert view.rainy(1).shape == (3, 16, 16)
