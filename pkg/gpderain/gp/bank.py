"""Feature bank of labeled latent matrices."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal, Protocol

import numpy as np

from gpderain.core import storage
from gpderain.core.exceptions import GPError, ShapeError
from gpderain.gp.kernels import KernelSpec, get_kernel, resolve_kernel_spec
from gpderain.model.latent import LatentMatrix
from gpderain.model.network import DerainNet
from gpderain.tensor import no_grad

logger = logging.getLogger(__name__)

BankMode = Literal["whole-latent", "per-feature-map"]
BANK_KIND = "bank"

_MODE_BY_GP_MODE: dict[str, BankMode] = {
    "syn2real": "whole-latent",
    "syn2real++": "per-feature-map",
}


def bank_mode_for(gp_mode: str) -> BankMode:
    """Map a training gp_mode to the bank mode it needs.

    Raises:
        GPError: For gp_mode "off" or unknown modes
    """
    try:
        return _MODE_BY_GP_MODE[gp_mode]
    except KeyError:
        raise GPError(f"gp_mode '{gp_mode}' has no feature bank", context={"gp_mode": gp_mode})


class ImageSource(Protocol):
    """Indexed labeled images the bank is built from."""

    def __len__(self) -> int: ...

    def image_id(self, index: int) -> str: ...

    def rainy(self, index: int) -> np.ndarray:
        """Rainy input [3, crop, crop] in [0, 1]."""
        ...


@dataclass
class FeatureBank:
    """Latent matrices of labeled images, stacked as [N_l, M, D].

    The bank is immutable between rebuilds, so posteriors for different
    unlabeled images can read it concurrently.
    """

    image_ids: list[str]
    latents: np.ndarray
    mode: BankMode
    built_at_epoch: int = 0
    kernel: KernelSpec = field(default_factory=KernelSpec)

    def __post_init__(self) -> None:
        self.latents = np.array(self.latents, dtype=np.float64)
        if self.latents.ndim != 3:
            raise ShapeError(
                "bank latents must be [N_l, M, D]", context={"shape": self.latents.shape}
            )
        if len(self.image_ids) != self.latents.shape[0]:
            raise ShapeError(
                "bank image_ids and latents disagree in length",
                context={"ids": len(self.image_ids), "latents": self.latents.shape[0]},
            )
        if not self.image_ids:
            raise GPError("feature bank is empty")
        self.latents.setflags(write=False)

    def __len__(self) -> int:
        return len(self.image_ids)

    @property
    def rows(self) -> int:
        return self.latents.shape[1]

    @property
    def cols(self) -> int:
        return self.latents.shape[2]

    @property
    def entries(self) -> list[tuple[str, LatentMatrix]]:
        return [(i, LatentMatrix(z)) for i, z in zip(self.image_ids, self.latents)]

    def kernel_rows(self, indices: np.ndarray | None = None) -> np.ndarray:
        """GP training rows: all feature maps (per-feature-map) or flattened latents."""
        latents = self.latents if indices is None else self.latents[indices]
        if self.mode == "per-feature-map":
            return latents.reshape(-1, self.cols)
        return latents.reshape(latents.shape[0], -1)

    def export(self, path: str) -> None:
        """Dump ids, latents, mode and kernel to a bank container."""
        metadata = {
            "image_ids": self.image_ids,
            "mode": self.mode,
            "built_at_epoch": self.built_at_epoch,
            "kernel": self.kernel.model_dump(),
        }
        storage.write_tensors(path, {"latents": self.latents}, kind=BANK_KIND, metadata=metadata)

    @classmethod
    def load(cls, path: str) -> "FeatureBank":
        tensors, metadata = storage.read_tensors(path, kind=BANK_KIND)
        return cls(
            image_ids=list(metadata["image_ids"]),
            latents=tensors["latents"],
            mode=metadata["mode"],
            built_at_epoch=int(metadata.get("built_at_epoch", 0)),
            kernel=KernelSpec(**metadata.get("kernel", {})),
        )


def rebuild_bank(
    source: ImageSource,
    net: DerainNet,
    max_entries: int,
    seed: int,
    mode: BankMode = "per-feature-map",
    kernel: str = "lin",
    rq_alpha: float = 1.0,
    epoch: int = 0,
    batch: int = 16,
) -> FeatureBank:
    """Encode a seeded subset of labeled images with the current encoder.

    Gradients are disabled for the whole build. SE/RQ length scales are set
    from the median pairwise distance of the new bank's kernel rows.

    Args:
        source: Labeled images
        net: Network whose encoder produces the latents
        max_entries: Bank size cap
        seed: Subset and heuristic seed
        mode: Bank mode
        kernel: Registered kernel name
        rq_alpha: RQ shape parameter
        epoch: Epoch stamped on the bank
        batch: Images encoded per forward pass

    Returns:
        FeatureBank with min(len(source), max_entries) entries

    Raises:
        GPError: If the labeled set is empty or the kernel is unknown
    """
    total = len(source)
    if total == 0:
        raise GPError("cannot build a feature bank from an empty labeled set")

    if max_entries >= total:
        indices = np.arange(total)
    else:
        indices = np.sort(np.random.default_rng(seed).choice(total, max_entries, replace=False))

    latents = []
    with no_grad():
        for start in range(0, len(indices), batch):
            chunk = indices[start : start + batch]
            x = np.stack([source.rainy(int(i)) for i in chunk])
            latents.append(net.latent(x).data)
    stacked = np.concatenate(latents, axis=0)
    ids = [source.image_id(int(i)) for i in indices]

    bank = FeatureBank(image_ids=ids, latents=stacked, mode=mode, built_at_epoch=epoch)
    rows = None if kernel == "lin" else bank.kernel_rows()
    bank.kernel = resolve_kernel_spec(kernel, rows, seed=seed, alpha=rq_alpha)
    get_kernel(bank.kernel)

    logger.info(
        "Feature bank rebuilt",
        extra={
            "epoch": epoch,
            "bank_size": len(bank),
            "mode": mode,
            "kernel": bank.kernel.kind,
            "length_scale": bank.kernel.length_scale,
        },
    )
    return bank
