"""In-memory datasets over manifests, with seeded batch iteration."""

from __future__ import annotations

import logging
from typing import Iterator, Optional

import numpy as np

from gpderain.core.exceptions import DataError
from gpderain.rainsynth.domain import random_crop
from gpderain.rainsynth.imageio import read_png
from gpderain.rainsynth.manifest import DatasetManifest

logger = logging.getLogger(__name__)


class ManifestDataset:
    """All images of a manifest loaded as [3, H, W] arrays.

    Training needs every file, so a missing image is an error here (the
    evaluator skips missing records instead).
    """

    def __init__(self, manifest: DatasetManifest, require_clean: bool = False):
        if require_clean and not manifest.labeled:
            raise DataError(
                f"manifest for domain {manifest.domain} has no clean images",
                context={"domain": manifest.domain},
            )
        if len(manifest) == 0:
            raise DataError("manifest has no records", context={"domain": manifest.domain})
        missing = manifest.missing_files()
        if missing:
            raise DataError(
                f"manifest references {len(missing)} missing files",
                context={"domain": manifest.domain, "first_missing": missing[0]},
            )
        self.manifest = manifest
        self.ids = [r.id for r in manifest.records]
        self._rainy = [read_png(manifest.resolve(r.rainy)) for r in manifest.records]
        self._clean: Optional[list[np.ndarray]] = None
        if manifest.labeled:
            self._clean = [read_png(manifest.resolve(r.clean)) for r in manifest.records]
        logger.debug(
            "Dataset loaded", extra={"domain": manifest.domain, "records": len(self.ids)}
        )

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def labeled(self) -> bool:
        return self._clean is not None

    def image_id(self, index: int) -> str:
        return self.ids[index]

    def rainy(self, index: int) -> np.ndarray:
        return self._rainy[index]

    def clean(self, index: int) -> np.ndarray:
        if self._clean is None:
            raise DataError("dataset is unlabeled", context={"domain": self.manifest.domain})
        return self._clean[index]

    def batches(
        self, rng: np.random.Generator, batch_size: int, crop: int
    ) -> Iterator[tuple[list[str], np.ndarray, Optional[np.ndarray]]]:
        """One shuffled pass: (ids, x [B, 3, crop, crop], y or None).

        The last batch may be smaller. Paired images share their crop window.
        """
        order = rng.permutation(len(self))
        for start in range(0, len(order), batch_size):
            chunk = order[start : start + batch_size]
            xs, ys = [], []
            for i in chunk:
                crop_seed = int(rng.integers(0, 2**63 - 1))
                xs.append(random_crop(self._rainy[i], crop, np.random.default_rng(crop_seed)))
                if self._clean is not None:
                    ys.append(random_crop(self._clean[i], crop, np.random.default_rng(crop_seed)))
            ids = [self.ids[i] for i in chunk]
            yield ids, np.stack(xs), (np.stack(ys) if ys else None)

    def endless_batches(
        self, rng: np.random.Generator, batch_size: int, crop: int
    ) -> Iterator[tuple[list[str], np.ndarray, Optional[np.ndarray]]]:
        """Shuffled passes repeated forever."""
        while True:
            yield from self.batches(rng, batch_size, crop)


def center_crop(image: np.ndarray, size: int) -> np.ndarray:
    """Central size x size window of a [3, H, W] image, reflect-padded when smaller."""
    _, h, w = image.shape
    pad_h, pad_w = max(size - h, 0), max(size - w, 0)
    if pad_h or pad_w:
        image = np.pad(image, ((0, 0), (0, pad_h), (0, pad_w)), mode="reflect")
        _, h, w = image.shape
    top, left = (h - size) // 2, (w - size) // 2
    return image[:, top : top + size, left : left + size]


class CenterCropped:
    """Read-only view of a dataset whose rainy images are center-cropped to `crop`."""

    def __init__(self, dataset: ManifestDataset, crop: int):
        self.dataset = dataset
        self.crop = crop

    def __len__(self) -> int:
        return len(self.dataset)

    def image_id(self, index: int) -> str:
        return self.dataset.image_id(index)

    def rainy(self, index: int) -> np.ndarray:
        return center_crop(self.dataset.rainy(index), self.crop)
