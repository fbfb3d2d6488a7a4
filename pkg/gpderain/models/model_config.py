"""Network shape configuration."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ModelConfig(BaseModel):
    """Channel plan and crop size of the encoder/decoder.

    The encoder runs Conv3x3(3, base) and then three Res2Block stages at
    `latent_channels`, each followed by a Downsample, then three Res2Blocks at
    `bottleneck_channels`. The decoder mirrors it with Upsamples.
    """

    model_config = ConfigDict(extra="forbid")

    base_channels: int = Field(default=16, description="Stem convolution width", gt=0)
    latent_channels: int = Field(
        default=32, description="Stage width; rows M of the bank latent view", gt=0
    )
    bottleneck_channels: int = Field(
        default=64, description="Width of the final encoder blocks", gt=0
    )
    res2_scale: int = Field(default=4, description="Res2Block group count s", gt=0)
    n_downsamples: int = Field(default=3, description="Number of 2x downsamples", ge=1)
    crop: int = Field(default=64, description="Training crop / tile side in pixels", gt=0)
    latent_tap: Literal["stage", "bottleneck"] = Field(
        default="stage",
        description="Where the latent matrix is read: after the last Downsample or at the encoder output",
    )
    leaky_slope: float = Field(default=0.2, description="Leaky ReLU slope", gt=0, lt=1)

    @model_validator(mode="after")
    def validate_shape_plan(self) -> "ModelConfig":
        """Check crop divisibility and Res2Block group widths."""
        factor = 2**self.n_downsamples
        if self.crop % factor:
            raise ValueError(
                f"crop {self.crop} is not divisible by 2^n_downsamples = {factor}"
            )
        for name in ("base_channels", "latent_channels", "bottleneck_channels"):
            width = getattr(self, name)
            if width % self.res2_scale:
                raise ValueError(
                    f"{name}={width} is not divisible by res2_scale={self.res2_scale}"
                )
        return self

    @property
    def latent_side(self) -> int:
        """Spatial side s of the latent feature maps."""
        return self.crop // 2**self.n_downsamples

    @property
    def latent_rows(self) -> int:
        """M, the number of feature-map rows in the latent matrix."""
        if self.latent_tap == "stage":
            return self.latent_channels
        return self.bottleneck_channels

    @property
    def latent_dim(self) -> int:
        """D, the vectorized spatial size of one feature map."""
        return self.latent_side**2
