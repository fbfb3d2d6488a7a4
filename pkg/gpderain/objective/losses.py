"""Supervised, unsupervised (GP) and total losses."""

from __future__ import annotations

from typing import Optional

from gpderain.core.exceptions import FactorizationError, ShapeError, TensorError
from gpderain.gp.posterior import GPPosterior
from gpderain.models.train_config import LossWeights
from gpderain.objective.features import FeatureExtractor, get_extractor
from gpderain.tensor import Tensor, as_tensor, ops


def _check_same_shape(a: Tensor, b: Tensor, op: str) -> None:
    if a.shape != b.shape:
        raise ShapeError(
            f"{op} inputs differ in shape: {a.shape} vs {b.shape}",
            context={"y_pred": a.shape, "y": b.shape},
        )


def l1_loss(y_pred, y) -> Tensor:
    """Mean absolute error over all elements."""
    y_pred, y = as_tensor(y_pred), as_tensor(y)
    _check_same_shape(y_pred, y, "l1_loss")
    return ops.mean(ops.abs(y_pred - y))


def feature_loss(
    y_pred, y, extractor_seed: int = 0, extractor: Optional[FeatureExtractor] = None
) -> Tensor:
    """Sum over extractor layers of the mean squared feature difference.

    Args:
        y_pred: Predicted images [N, 3, H, W]
        y: Target images
        extractor_seed: Seed of the built-in random extractor
        extractor: External extractor used instead of the built-in one
    """
    y_pred, y = as_tensor(y_pred), as_tensor(y)
    _check_same_shape(y_pred, y, "feature_loss")
    extractor = extractor or get_extractor(extractor_seed)
    total = None
    for f_pred, f_true in zip(extractor(y_pred), extractor(y.detach())):
        term = ops.mean(ops.square(f_pred - f_true))
        total = term if total is None else total + term
    return total if total is not None else Tensor(0.0)


def sup_loss(
    y_pred,
    y,
    weights: LossWeights,
    extractor_seed: int = 0,
    extractor: Optional[FeatureExtractor] = None,
) -> Tensor:
    """L1 + lambda_p * feature loss; the feature term is skipped at lambda_p = 0."""
    loss = l1_loss(y_pred, y)
    if weights.lambda_p > 0:
        loss = loss + ops.scale(
            feature_loss(y_pred, y, extractor_seed=extractor_seed, extractor=extractor),
            weights.lambda_p,
        )
    return loss


def unsup_loss(z_pred, post: GPPosterior) -> Tensor:
    """Variance-weighted latent loss against a GP pseudo label.

    With delta = z_pred - mu:

        loss = trace(delta^T Sigma^-1 delta) / D + log det Sigma

    D is the feature-map size. In whole-latent mode z_pred is flattened to
    one row first, Sigma is 1 x 1 and the quadratic is not divided:

        loss = ||delta||^2 / sigma + log sigma

    mu is a constant; Sigma keeps whatever graph it was built with.

    Args:
        z_pred: Latent matrix [M, D]
        post: Posterior computed for this latent

    Raises:
        ShapeError: If z_pred does not match the posterior
        FactorizationError: If Sigma is not positive definite
    """
    z_pred = as_tensor(z_pred)
    if post.mode == "whole-latent":
        z_pred = ops.reshape(z_pred, (1, z_pred.size))
    if z_pred.shape != post.mu.shape:
        raise ShapeError(
            f"latent {z_pred.shape} does not match posterior mean {post.mu.shape}",
            context={"latent": z_pred.shape, "mu": post.mu.shape, "mode": post.mode},
        )

    delta = z_pred - post.mu
    try:
        solved = ops.spd_solve(post.sigma, delta)
        log_det = ops.spd_logdet(post.sigma)
    except TensorError as e:
        raise FactorizationError(
            "posterior covariance is not positive definite",
            context={"shape": post.sigma.shape, "sigma_eps2": post.sigma_eps2},
        ) from e
    quadratic = ops.sum(delta * solved)
    if post.mode == "per-feature-map":
        quadratic = ops.scale(quadratic, 1.0 / delta.shape[1])
    return quadratic + log_det


def total_loss(
    sup: Tensor, unsup: Optional[Tensor], weights: LossWeights
) -> Tensor:
    """L_sup + lambda_unsup * L_unsup."""
    if unsup is None:
        return sup
    return sup + ops.scale(unsup, weights.lambda_unsup)
