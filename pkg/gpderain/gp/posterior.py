"""Closed-form GP posterior over neighbour latents (pseudo ground truth)."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import linalg

from gpderain.core.exceptions import FactorizationError, GPError, ShapeError
from gpderain.gp.bank import BankMode, FeatureBank
from gpderain.gp.kernels import KernelSpec, get_kernel, gram_tensor
from gpderain.gp.nearest import Neighbors, nearest
from gpderain.tensor import Tensor, as_tensor, ops

logger = logging.getLogger(__name__)

JITTER_STEPS = 4
JITTER_FACTOR = 10.0


@dataclass
class GPPosterior:
    """Posterior of one unlabeled latent given its neighbours.

    `mu` is a constant target. `sigma` is a tensor that stays on the tape
    when the latent it was computed from requires a gradient.

    Attributes:
        mu: Pseudo-GT, [M, D] per-feature-map or [1, M*D] whole-latent
        sigma: Posterior covariance, [M, M] or [1, 1]
        chol: Lower Cholesky factor of the regularized neighbour Gram matrix
        alpha: Combination weights k_star G^-1, one row per output row;
            in whole-latent mode row 0 holds one weight per neighbour
        mode: Bank mode the posterior was computed in
        sigma_eps2: Noise variance added to the prior and the posterior
        noise: Diagonal actually added to the Gram matrix (sigma_eps2 unless jittered)
        neighbor_ids: Image ids of the conditioning neighbours
        neighbor_indices: Bank indices of the neighbours
        scores: Whole-latent similarity of each neighbour
    """

    mu: np.ndarray
    sigma: Tensor
    chol: np.ndarray
    alpha: np.ndarray
    mode: BankMode
    sigma_eps2: float
    noise: float
    neighbor_ids: list[str]
    neighbor_indices: np.ndarray
    scores: np.ndarray

    @property
    def sigma_value(self) -> np.ndarray:
        return self.sigma.data

    def sigma_eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.sigma_value)


def factorize_with_jitter(
    gram: np.ndarray, sigma_eps2: float
) -> tuple[tuple[np.ndarray, bool], float]:
    """Cholesky-factor gram + noise*I, multiplying the noise by 10 on failure.

    Args:
        gram: Symmetric kernel matrix
        sigma_eps2: Initial diagonal noise

    Returns:
        (scipy cho_factor result, noise used)

    Raises:
        FactorizationError: If every rung of the ladder fails
    """
    attempts = []
    noise = sigma_eps2
    eye = np.eye(gram.shape[0])
    for step in range(JITTER_STEPS + 1):
        attempts.append(noise)
        regularized = gram + noise * eye
        if np.all(np.isfinite(regularized)):
            try:
                factor = linalg.cho_factor(regularized, lower=True)
                if step:
                    logger.warning(
                        "Gram factorization needed jitter", extra={"noise": noise, "step": step}
                    )
                return factor, noise
            except linalg.LinAlgError:
                pass
        noise *= JITTER_FACTOR
    raise FactorizationError(
        "Gram matrix is not positive definite after jitter escalation",
        context={"jitter_ladder": attempts, "size": gram.shape[0]},
    )


def posterior(
    z_u: Union[Tensor, np.ndarray],
    neighbor_latents: np.ndarray,
    spec: KernelSpec,
    sigma_eps2: float = 1.0,
    mode: BankMode = "per-feature-map",
    neighbors: Optional[Neighbors] = None,
) -> GPPosterior:
    """Condition the GP on neighbour latents and evaluate it at z_u.

    Per-feature-map mode treats the M*N_n neighbour feature maps as training
    inputs and each row of z_u as a test input:

        mu    = k_star G^-1 F                               [M, D]
        Sigma = K(z_u, z_u) - k_star G^-1 k_star^T + s^2 I   [M, M]

    with G = K(F, F) + s^2 I. Whole-latent mode does the same with flattened
    latents, so mu is [1, M*D] and Sigma is [1, 1]. G is factorized once and
    every solve uses the factor.

    Args:
        z_u: Unlabeled latent [M, D]; a tensor keeps Sigma differentiable
        neighbor_latents: Neighbour latents [N_n, M, D]
        spec: Kernel spec
        sigma_eps2: Noise variance s^2, > 0
        mode: "per-feature-map" or "whole-latent"
        neighbors: Retrieval result, recorded on the posterior

    Returns:
        GPPosterior

    Raises:
        GPError: If there are no neighbours or sigma_eps2 <= 0
        ShapeError: If z_u and the neighbour latents disagree
        FactorizationError: If G cannot be factorized
    """
    if sigma_eps2 <= 0:
        raise GPError("sigma_eps2 must be positive", context={"sigma_eps2": sigma_eps2})
    neighbor_latents = np.asarray(neighbor_latents, dtype=np.float64)
    if neighbor_latents.ndim != 3 or neighbor_latents.shape[0] == 0:
        raise GPError(
            "posterior needs a non-empty [N_n, M, D] neighbour stack",
            context={"shape": neighbor_latents.shape},
        )
    z_t = as_tensor(z_u)
    n, m, d = neighbor_latents.shape
    if z_t.shape != (m, d):
        raise ShapeError(
            f"latent {z_t.shape} does not match neighbour latents ({m}, {d})",
            context={"latent": z_t.shape, "neighbors": neighbor_latents.shape},
        )

    if mode == "per-feature-map":
        train_rows = neighbor_latents.reshape(n * m, d)
        test_rows = z_t
    elif mode == "whole-latent":
        train_rows = neighbor_latents.reshape(n, m * d)
        test_rows = ops.reshape(z_t, (1, m * d))
    else:
        raise GPError(f"unknown posterior mode '{mode}'", context={"mode": mode})

    kernel = get_kernel(spec)
    factor, noise = factorize_with_jitter(kernel.matrix(train_rows, train_rows), sigma_eps2)

    k_star = gram_tensor(spec, test_rows, train_rows)
    alpha = linalg.cho_solve(factor, k_star.data.T).T
    mu = alpha @ train_rows

    k_self = gram_tensor(spec, test_rows, test_rows)
    explained = ops.matmul(k_star, ops.cho_solve(factor, ops.transpose(k_star)))
    sigma = k_self - explained + sigma_eps2 * np.eye(test_rows.shape[0])
    sigma = ops.scale(sigma + ops.transpose(sigma), 0.5)

    if neighbors is None:
        indices = np.arange(n)
        ids = [str(i) for i in indices]
        scores = np.full(n, np.nan)
    else:
        indices, ids, scores = neighbors.indices, neighbors.image_ids, neighbors.scores

    return GPPosterior(
        mu=mu,
        sigma=sigma,
        chol=np.tril(factor[0]),
        alpha=alpha,
        mode=mode,
        sigma_eps2=sigma_eps2,
        noise=noise,
        neighbor_ids=list(ids),
        neighbor_indices=np.asarray(indices),
        scores=np.asarray(scores),
    )


def pseudo_label(
    z_u: Union[Tensor, np.ndarray],
    bank: FeatureBank,
    n_neighbors: int,
    sigma_eps2: float = 1.0,
) -> GPPosterior:
    """Retrieve neighbours for z_u and condition on them, in the bank's mode and kernel."""
    z_values = z_u.data if isinstance(z_u, Tensor) else np.asarray(z_u, dtype=np.float64)
    found = nearest(z_values, bank, n_neighbors)
    return posterior(
        z_u,
        bank.latents[found.indices],
        bank.kernel,
        sigma_eps2=sigma_eps2,
        mode=bank.mode,
        neighbors=found,
    )
