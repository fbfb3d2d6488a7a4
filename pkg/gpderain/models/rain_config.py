"""Rain-domain and synthesis configuration models."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class RainParams(BaseModel):
    """Generative parameters of one synthetic rain domain.

    Angles are measured in degrees counter-clockwise from the image x axis,
    so 90 is vertical rain. Every "spread" is the half-width of a uniform
    draw around its mean.
    """

    model_config = ConfigDict(extra="forbid")

    orientation_deg: float = Field(default=70.0, description="Mean streak angle in degrees")
    orientation_spread: float = Field(default=10.0, description="Angle spread in degrees", ge=0)
    density: float = Field(
        default=8.0, description="Expected streaks per 1000 pixels (0 renders no rain)", ge=0
    )
    length_px: float = Field(default=20.0, description="Mean streak length in pixels", gt=0)
    length_spread: float = Field(default=5.0, description="Streak length spread", ge=0)
    width_px: float = Field(default=1.0, description="Streak width in pixels", ge=1, le=3)
    intensity: float = Field(default=0.6, description="Mean additive brightness", gt=0, le=1)
    intensity_spread: float = Field(default=0.1, description="Brightness spread", ge=0)
    blur_sigma: float = Field(default=1.0, description="Along-streak Gaussian blur sigma", ge=0)
    seed: int = Field(default=0, description="Domain seed", ge=0, lt=2**64)

    @model_validator(mode="after")
    def validate_spreads(self) -> "RainParams":
        if self.length_spread >= self.length_px:
            raise ValueError("length_spread must be smaller than length_px")
        return self


class DomainConfig(BaseModel):
    """One rain domain to synthesize: its rain and its split sizes."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(description="Domain tag used in manifests and reports")
    rain: RainParams = Field(default_factory=RainParams, description="Rain parameters")
    n_train: int = Field(default=200, description="Training records", ge=0)
    n_test: int = Field(default=50, description="Test records", ge=0)

    @field_validator("name")
    @classmethod
    def validate_name(cls, v: str) -> str:
        if not v or "/" in v:
            raise ValueError("domain name must be a non-empty path-safe string")
        return v


def _default_source() -> DomainConfig:
    return DomainConfig(name="source", rain=RainParams(orientation_deg=70.0, density=8.0, seed=1))


def _default_target() -> DomainConfig:
    return DomainConfig(
        name="target", rain=RainParams(orientation_deg=110.0, density=16.0, seed=2)
    )


class SynthConfig(BaseModel):
    """Source (labeled) and target (unlabeled) domains plus base images."""

    model_config = ConfigDict(extra="forbid")

    source: DomainConfig = Field(default_factory=_default_source)
    target: DomainConfig = Field(default_factory=_default_target)
    base_images: Optional[str] = Field(
        default=None, description="Directory of clean PNGs; procedural textures when unset"
    )
    n_textures: int = Field(default=32, description="Procedural base images to generate", gt=0)
    texture_seed: int = Field(default=0, description="Seed of the texture generator", ge=0)
    image_size: int = Field(
        default=64, description="Side of the synthesized images (crops of base images)", gt=0
    )
    workers: int = Field(default=1, description="Parallel rendering workers", ge=1)

    @model_validator(mode="after")
    def validate_domain_names(self) -> "SynthConfig":
        if self.source.name == self.target.name:
            raise ValueError("source and target domains need different names")
        return self
