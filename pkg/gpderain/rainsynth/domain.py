"""Synthetic rain domains: render records, write PNGs and a manifest."""

import logging
import posixpath
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from gpderain.core import storage
from gpderain.core.exceptions import CheckpointError, DataError
from gpderain.core.parallel import parallel_map
from gpderain.models.rain_config import RainParams
from gpderain.rainsynth.imageio import quantize, write_png
from gpderain.rainsynth.manifest import DatasetManifest, ManifestRecord
from gpderain.rainsynth.render import render_rain

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
_SPLIT_CODES = {"train": 0, "test": 1}


@dataclass(frozen=True)
class _RecordJob:
    index: int
    record_id: str
    clean: np.ndarray
    seed: int


def random_crop(image: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    """Crop a [3, H, W] image to size x size; smaller images are reflect-padded first."""
    _, h, w = image.shape
    pad_h, pad_w = max(size - h, 0), max(size - w, 0)
    if pad_h or pad_w:
        image = np.pad(image, ((0, 0), (0, pad_h), (0, pad_w)), mode="reflect")
        _, h, w = image.shape
    top = int(rng.integers(0, h - size + 1))
    left = int(rng.integers(0, w - size + 1))
    return image[:, top : top + size, left : left + size]


def make_domain(
    base_images: Sequence[np.ndarray],
    params: RainParams,
    n: int,
    out_dir: str,
    labeled: bool,
    domain: str = "source",
    split: Literal["train", "test"] = "train",
    image_size: int = 64,
    workers: int = 1,
) -> DatasetManifest:
    """Render n rainy records of one domain split and write their manifest.

    Clean images are taken cyclically from `base_images` and randomly
    cropped. All randomness (crops and per-record rain seeds) comes from one
    generator seeded by (params.seed, split), so the manifest and its seeds
    reproduce every image byte for byte. Clean crops are quantized to 8 bits
    before rain is added, so the written clean PNG is exactly the image the
    rain was added to.

    Args:
        base_images: Clean [3, H, W] images in [0, 1]
        params: Domain rain parameters
        n: Number of records
        out_dir: Directory for images and manifest.json
        labeled: Write clean images too (unlabeled records carry rainy only)
        domain: Domain tag
        split: "train" or "test"
        image_size: Side of the written images
        workers: Parallel rendering workers

    Returns:
        The written DatasetManifest

    Raises:
        DataError: If there are no base images or out_dir is not writable
    """
    if not base_images:
        raise DataError("make_domain needs at least one base image", context={"domain": domain})

    rng = np.random.default_rng(np.random.SeedSequence([params.seed, _SPLIT_CODES[split]]))
    jobs = []
    for i in range(n):
        clean = quantize(random_crop(base_images[i % len(base_images)], image_size, rng))
        seed = int(rng.integers(0, 2**63 - 1))
        jobs.append(_RecordJob(i, f"{domain}-{split}-{i:05d}", clean, seed))

    def _render(job: _RecordJob) -> ManifestRecord:
        sample = render_rain(job.clean, params.model_copy(update={"seed": job.seed}))
        rainy_rel = f"rainy/{job.record_id}.png"
        write_png(posixpath.join(out_dir, rainy_rel), sample.rainy)
        clean_rel = None
        if labeled:
            clean_rel = f"clean/{job.record_id}.png"
            write_png(posixpath.join(out_dir, clean_rel), job.clean)
        return ManifestRecord(id=job.record_id, rainy=rainy_rel, clean=clean_rel, seed=job.seed)

    try:
        storage.makedirs(out_dir)
        records = parallel_map(_render, jobs, concurrency=workers)
        manifest = DatasetManifest(
            domain=domain, split=split, labeled=labeled, params=params, records=records
        )
        manifest.root = str(out_dir)
        manifest.save(posixpath.join(out_dir, MANIFEST_NAME))
    except (CheckpointError, OSError) as e:
        raise DataError(
            f"Cannot write domain {domain}/{split} to {out_dir}: {e}",
            context={"path": str(out_dir), "domain": domain},
        ) from e

    logger.info(
        "Domain written",
        extra={"domain": domain, "split": split, "records": n, "labeled": labeled},
    )
    return manifest
