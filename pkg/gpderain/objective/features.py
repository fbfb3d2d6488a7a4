"""Frozen random convolutional feature extractor for the perceptual term."""

from __future__ import annotations

from functools import lru_cache
from typing import Protocol, Sequence

import numpy as np

from gpderain.tensor import Tensor, ops


class FeatureExtractor(Protocol):
    """Maps images [N, 3, H, W] to a list of feature tensors."""

    def __call__(self, x: Tensor) -> list[Tensor]: ...


class RandomConvExtractor:
    """Three 3x3 conv layers with fixed seeded weights, leaky ReLU and 2x pooling.

    Weights are constants (never on the tape as leaves needing grad), so the
    feature loss only back-propagates into the images.
    """

    def __init__(self, seed: int = 0, channels: Sequence[int] = (8, 16, 16), slope: float = 0.2):
        rng = np.random.default_rng(seed)
        self.seed = seed
        self.slope = slope
        self.weights = []
        self.biases = []
        in_channels = 3
        for out_channels in channels:
            bound = np.sqrt(6.0 / (in_channels * 9))
            self.weights.append(
                Tensor(rng.uniform(-bound, bound, size=(out_channels, in_channels, 3, 3)))
            )
            self.biases.append(Tensor(np.zeros(out_channels)))
            in_channels = out_channels

    def __call__(self, x: Tensor) -> list[Tensor]:
        features = []
        h = x
        for weight, bias in zip(self.weights, self.biases):
            h = ops.leaky_relu(ops.conv2d(h, weight, bias, padding=1), self.slope)
            features.append(h)
            if h.shape[2] % 2 == 0 and h.shape[3] % 2 == 0 and h.shape[2] > 1:
                h = ops.avg_pool2(h)
        return features


@lru_cache(maxsize=8)
def get_extractor(seed: int) -> RandomConvExtractor:
    """Extractor for a seed, built once per process."""
    return RandomConvExtractor(seed)
