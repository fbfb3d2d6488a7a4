"""Nearest-neighbour retrieval from the feature bank."""

from dataclasses import dataclass

import numpy as np

from gpderain.core.exceptions import GPError, ShapeError
from gpderain.gp.bank import FeatureBank


@dataclass(frozen=True)
class Neighbors:
    """Selected bank entries, best first."""

    indices: np.ndarray
    image_ids: list[str]
    scores: np.ndarray

    def __len__(self) -> int:
        return len(self.indices)


def similarity_scores(z_u: np.ndarray, bank: FeatureBank) -> np.ndarray:
    """Whole-latent cosine similarity of z_u [M, D] to every bank entry."""
    z_u = np.asarray(z_u, dtype=np.float64)
    if z_u.shape != (bank.rows, bank.cols):
        raise ShapeError(
            f"latent {z_u.shape} does not match bank entries ({bank.rows}, {bank.cols})",
            context={"latent": z_u.shape, "bank": (bank.rows, bank.cols)},
        )
    flat_bank = bank.latents.reshape(len(bank), -1)
    flat_u = z_u.ravel()
    bank_norms = np.linalg.norm(flat_bank, axis=1)
    u_norm = np.linalg.norm(flat_u)
    dots = flat_bank @ flat_u
    denom = bank_norms * u_norm
    return np.where(denom > 0, dots / np.where(denom > 0, denom, 1.0), 0.0)


def nearest(z_u: np.ndarray, bank: FeatureBank, n_neighbors: int) -> Neighbors:
    """Top-N bank entries by whole-latent LIN similarity.

    Ties are broken by ascending bank index, so the result does not depend
    on anything but scores and bank order.

    Args:
        z_u: Unlabeled latent matrix [M, D]
        bank: Feature bank
        n_neighbors: N_n

    Returns:
        Neighbors sorted by descending score

    Raises:
        GPError: If the bank is empty or smaller than n_neighbors
    """
    if len(bank) == 0:
        raise GPError("nearest() needs a non-empty feature bank")
    if n_neighbors < 1:
        raise GPError("n_neighbors must be at least 1", context={"n_neighbors": n_neighbors})
    if n_neighbors > len(bank):
        raise GPError(
            f"bank has {len(bank)} entries but n_neighbors={n_neighbors}; "
            "lower train.n_neighbors or use more labeled images / a larger bank_max_entries",
            context={"bank_size": len(bank), "n_neighbors": n_neighbors},
        )

    scores = similarity_scores(z_u, bank)
    order = np.lexsort((np.arange(len(scores)), -scores))[:n_neighbors]
    return Neighbors(
        indices=order,
        image_ids=[bank.image_ids[i] for i in order],
        scores=scores[order],
    )
