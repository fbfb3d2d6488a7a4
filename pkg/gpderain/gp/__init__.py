"""Gaussian-process pseudo-label engine: kernels, feature bank, retrieval, posterior."""

from gpderain.gp.bank import BankMode, FeatureBank, ImageSource, bank_mode_for, rebuild_bank
from gpderain.gp.kernels import (
    Kernel,
    KernelSpec,
    get_kernel,
    gram,
    gram_tensor,
    kernel_eval,
    list_kernels,
    median_length_scale,
    register_kernel,
    resolve_kernel_spec,
)
from gpderain.gp.nearest import Neighbors, nearest, similarity_scores
from gpderain.gp.posterior import GPPosterior, factorize_with_jitter, posterior, pseudo_label

__all__ = [
    "BankMode",
    "FeatureBank",
    "GPPosterior",
    "ImageSource",
    "Kernel",
    "KernelSpec",
    "Neighbors",
    "bank_mode_for",
    "factorize_with_jitter",
    "get_kernel",
    "gram",
    "gram_tensor",
    "kernel_eval",
    "list_kernels",
    "median_length_scale",
    "nearest",
    "posterior",
    "pseudo_label",
    "rebuild_bank",
    "register_kernel",
    "resolve_kernel_spec",
    "similarity_scores",
]
