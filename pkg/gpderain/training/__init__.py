"""Optimizer, datasets, training loop, inference and evaluation."""

from gpderain.training.data import CenterCropped, ManifestDataset, center_crop
from gpderain.training.evaluate import EvalReport, evaluate
from gpderain.training.inference import tiled_derain
from gpderain.training.optim import Adam, step_lr
from gpderain.training.trainer import Trainer, labeled_step, train, unlabeled_step

__all__ = [
    "Adam",
    "CenterCropped",
    "EvalReport",
    "ManifestDataset",
    "Trainer",
    "center_crop",
    "evaluate",
    "labeled_step",
    "step_lr",
    "tiled_derain",
    "train",
    "unlabeled_step",
]
