"""Losses and image quality metrics."""

from gpderain.objective.features import FeatureExtractor, RandomConvExtractor, get_extractor
from gpderain.objective.losses import feature_loss, l1_loss, sup_loss, total_loss, unsup_loss
from gpderain.objective.metrics import PSNR_CAP_DB, psnr, ssim

__all__ = [
    "FeatureExtractor",
    "PSNR_CAP_DB",
    "RandomConvExtractor",
    "feature_loss",
    "get_extractor",
    "l1_loss",
    "psnr",
    "ssim",
    "sup_loss",
    "total_loss",
    "unsup_loss",
]
