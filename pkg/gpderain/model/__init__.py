"""Encoder/decoder network, latent view and checkpoints."""

from gpderain.model.checkpoint import load_checkpoint, save_checkpoint
from gpderain.model.latent import LatentMatrix
from gpderain.model.layers import Conv2d, Downsample, LeakyReLU, Upsample
from gpderain.model.network import Decoder, DerainNet, Encoder, init_params, latent_rows
from gpderain.model.res2block import Res2Block

__all__ = [
    "Conv2d",
    "Decoder",
    "DerainNet",
    "Downsample",
    "Encoder",
    "LatentMatrix",
    "LeakyReLU",
    "Res2Block",
    "Upsample",
    "init_params",
    "latent_rows",
    "load_checkpoint",
    "save_checkpoint",
]
