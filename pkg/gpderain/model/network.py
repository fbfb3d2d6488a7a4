"""Encoder/decoder rain-residue network."""

from __future__ import annotations

import logging

import numpy as np

from gpderain.core.exceptions import ShapeError
from gpderain.model.layers import Conv2d, Downsample, LeakyReLU, Upsample
from gpderain.model.res2block import Res2Block
from gpderain.models.model_config import ModelConfig
from gpderain.tensor import Module, Tensor, as_tensor, ops

logger = logging.getLogger(__name__)


class Encoder(Module):
    """Stem conv, Res2Block stages with Downsamples, then bottleneck blocks.

    `forward` returns `(features, tap)`: the encoder output and the stage
    output read as the latent matrix (the same tensor when the tap is
    "bottleneck").
    """

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        b, m, c = config.base_channels, config.latent_channels, config.bottleneck_channels
        s, slope = config.res2_scale, config.leaky_slope

        self.stem = self.add_module("stem", Conv2d(3, b, 3))
        self.act = LeakyReLU(slope)
        self.down = Downsample()
        self.stages = [
            self.add_module(f"stage{i}", Res2Block(b if i == 0 else m, m, s, slope))
            for i in range(config.n_downsamples)
        ]
        self.bottleneck = [
            self.add_module(f"bottleneck{i}", Res2Block(m if i == 0 else c, c, s, slope))
            for i in range(3)
        ]

    def forward(self, x: Tensor) -> tuple[Tensor, Tensor]:
        h = self.act(self.stem(x))
        for stage in self.stages:
            h = self.down(stage(h))
        tap = h
        for block in self.bottleneck:
            h = block(h)
        if self.config.latent_tap == "bottleneck":
            tap = h
        return h, tap


class Decoder(Module):
    """Mirror of the encoder: Res2Block + Upsample per stage, then Conv3x3 to RGB."""

    def __init__(self, config: ModelConfig):
        super().__init__()
        b, m, c = config.base_channels, config.latent_channels, config.bottleneck_channels
        s, slope = config.res2_scale, config.leaky_slope
        n = config.n_downsamples

        widths = [c] + [m] * (n - 1) + [b]
        self.up = Upsample()
        self.stages = [
            self.add_module(f"stage{i}", Res2Block(widths[i], widths[i + 1], s, slope))
            for i in range(n)
        ]
        self.head = self.add_module("head", Conv2d(b, 3, 3))

    def forward(self, z: Tensor) -> Tensor:
        h = z
        for stage in self.stages:
            h = self.up(stage(h))
        return self.head(h)


class DerainNet(Module):
    """Rain-residue predictor: r = decode(encode(x)), derained y = x - r."""

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.encoder = self.add_module("encoder", Encoder(config))
        self.decoder = self.add_module("decoder", Decoder(config))

    def encoder_parameters(self) -> list[Tensor]:
        return self.encoder.parameters()

    def decoder_parameters(self) -> list[Tensor]:
        return self.decoder.parameters()

    def _check_input(self, x: Tensor) -> None:
        crop = self.config.crop
        if x.ndim != 4 or x.shape[1] != 3 or x.shape[2] != crop or x.shape[3] != crop:
            raise ShapeError(
                f"expected images of shape [N, 3, {crop}, {crop}], got {x.shape}",
                context={"input": x.shape, "crop": crop},
            )

    def encode_with_tap(self, x) -> tuple[Tensor, Tensor]:
        x = as_tensor(x)
        self._check_input(x)
        return self.encoder(x)

    def encode(self, x) -> Tensor:
        """Encoder output [N, bottleneck_channels, s, s]."""
        return self.encode_with_tap(x)[0]

    def latent(self, x) -> Tensor:
        """Latent matrices [N, M, D] read at the configured tap."""
        _, tap = self.encode_with_tap(x)
        return latent_rows(tap)

    def decode(self, z) -> Tensor:
        """Rain residue [N, 3, crop, crop]; unbounded, no output activation."""
        z = as_tensor(z)
        expected = (self.config.bottleneck_channels, self.config.latent_side, self.config.latent_side)
        if z.ndim != 4 or z.shape[1:] != expected:
            raise ShapeError(
                f"decoder expects latents of shape [N, {expected[0]}, {expected[1]}, {expected[2]}], got {z.shape}",
                context={"latent": z.shape, "expected": expected},
            )
        return self.decoder(z)

    def residue(self, x) -> Tensor:
        return self.decode(self.encode(x))

    def derain(self, x) -> Tensor:
        """y = x - r; never clamped here."""
        x = as_tensor(x)
        return x - self.residue(x)

    def forward(self, x) -> Tensor:
        return self.derain(x)

    def zero_residue(self) -> None:
        """Zero the output conv so the network predicts r = 0 everywhere."""
        self.decoder.head.weight.data = np.zeros_like(self.decoder.head.weight.data)
        self.decoder.head.bias.data = np.zeros_like(self.decoder.head.bias.data)


def latent_rows(features: Tensor) -> Tensor:
    """View [N, M, s, s] feature maps as [N, M, s*s] row-major latent matrices."""
    n, m, h, w = features.shape
    return ops.reshape(features, (n, m, h * w))


def init_params(config: ModelConfig, seed: int) -> DerainNet:
    """Build a network with fan-in scaled uniform weights and zero biases.

    Each conv weight is drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)), in
    parameter registration order, from one generator seeded with `seed`.

    Args:
        config: Network shape
        seed: Any non-negative 64-bit integer

    Returns:
        Initialized DerainNet
    """
    net = DerainNet(config)
    rng = np.random.default_rng(seed)
    for name, param in net.named_parameters():
        if name.endswith(".weight"):
            fan_in = int(np.prod(param.shape[1:]))
            bound = 1.0 / np.sqrt(fan_in)
            param.data = rng.uniform(-bound, bound, size=param.shape)
        else:
            param.data = np.zeros(param.shape)
    logger.debug(
        "Initialized network", extra={"seed": seed, "parameters": len(net.parameters())}
    )
    return net
