"""Evaluation of a network on a labeled manifest."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from gpderain.core import storage
from gpderain.core.exceptions import DataError
from gpderain.core.parallel import parallel_map
from gpderain.model.network import DerainNet
from gpderain.objective.metrics import psnr, ssim
from gpderain.rainsynth.imageio import read_png, write_png
from gpderain.rainsynth.manifest import DatasetManifest, ManifestRecord
from gpderain.tensor import ops
from gpderain.training.inference import tiled_derain

logger = logging.getLogger(__name__)


@dataclass
class EvalReport:
    """Per-image rows {image_id, psnr, ssim} plus skipped record ids."""

    domain: str
    rows: list[dict[str, Any]] = field(default_factory=list)
    skipped: list[dict[str, str]] = field(default_factory=list)

    @property
    def psnr(self) -> float:
        return float(np.mean([r["psnr"] for r in self.rows])) if self.rows else float("nan")

    @property
    def ssim(self) -> float:
        return float(np.mean([r["ssim"] for r in self.rows])) if self.rows else float("nan")

    def summary(self) -> dict[str, Any]:
        return {
            "domain": self.domain,
            "images": len(self.rows),
            "skipped": len(self.skipped),
            "psnr": self.psnr,
            "ssim": self.ssim,
        }

    def to_dict(self) -> dict[str, Any]:
        return {"summary": self.summary(), "rows": self.rows, "skipped": self.skipped}

    def save(self, path: str) -> None:
        storage.write_json(path, self.to_dict())


def evaluate(
    net: DerainNet,
    manifest: DatasetManifest,
    workers: int = 1,
    sample_dir: Optional[str] = None,
    samples: int = 0,
) -> EvalReport:
    """Derain every record, clamp to [0, 1], and score against the clean image.

    Records whose files are missing or unreadable are skipped with a warning
    and listed in the report.

    Args:
        net: Network (read-only during evaluation)
        manifest: Labeled manifest
        workers: Images evaluated in parallel
        sample_dir: Where to write rainy/derained/clean PNG triplets
        samples: Number of leading records written as triplets

    Returns:
        EvalReport

    Raises:
        DataError: If the manifest carries no clean images
    """
    if not manifest.labeled:
        raise DataError(
            f"cannot evaluate domain {manifest.domain}: manifest has no clean images",
            context={"domain": manifest.domain},
        )

    def _score(item: tuple[int, ManifestRecord]) -> dict[str, Any]:
        index, record = item
        try:
            rainy = read_png(manifest.resolve(record.rainy))
            clean = read_png(manifest.resolve(record.clean))
        except DataError as e:
            logger.warning(
                "Skipping evaluation record",
                extra={"domain": manifest.domain, "image_id": record.id, "reason": str(e)},
            )
            return {"image_id": record.id, "skipped": str(e)}
        derained = ops.clamp(tiled_derain(net, rainy), 0.0, 1.0).data
        if sample_dir is not None and index < samples:
            for tag, image in (("rainy", rainy), ("derained", derained), ("clean", clean)):
                write_png(f"{sample_dir}/{manifest.domain}_{record.id}_{tag}.png", image)
        return {"image_id": record.id, "psnr": psnr(derained, clean), "ssim": ssim(derained, clean)}

    results = parallel_map(_score, list(enumerate(manifest.records)), concurrency=workers)

    report = EvalReport(domain=manifest.domain)
    for row in results:
        if "skipped" in row:
            report.skipped.append({"image_id": row["image_id"], "reason": row["skipped"]})
        else:
            report.rows.append(row)
    logger.info(
        "Evaluation finished",
        extra={"domain": manifest.domain, "psnr": report.psnr, "ssim": report.ssim},
    )
    return report
