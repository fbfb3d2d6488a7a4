"""Training configuration models."""

from dataclasses import dataclass
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

GPMode = Literal["off", "syn2real", "syn2real++"]


@dataclass(frozen=True)
class LossWeights:
    """Weights of the perceptual term and of the unlabeled GP term."""

    lambda_p: float = 0.04
    lambda_unsup: float = 1.5e-3

    def __post_init__(self) -> None:
        if self.lambda_p < 0 or self.lambda_unsup < 0:
            raise ValueError("loss weights must be non-negative")


class TrainConfig(BaseModel):
    """Optimizer, schedule and GP settings for one training run."""

    model_config = ConfigDict(extra="forbid")

    lr: float = Field(default=2e-4, description="Initial Adam learning rate", gt=0)
    batch: int = Field(default=4, description="Images per step", gt=0)
    epochs: int = Field(default=60, description="Number of epochs", gt=0)
    lr_decay: float = Field(
        default=0.5, description="Multiplicative decay applied every decay_every epochs", gt=0, le=1
    )
    decay_every: int = Field(default=30, description="Epochs between lr decays", gt=0)
    beta1: float = Field(default=0.9, description="Adam first-moment decay", ge=0, lt=1)
    beta2: float = Field(default=0.999, description="Adam second-moment decay", ge=0, lt=1)
    eps: float = Field(default=1e-8, description="Adam denominator epsilon", gt=0)

    n_neighbors: int = Field(default=32, description="N_n, nearest bank entries per image", gt=0)
    lambda_p: float = Field(default=0.04, description="Feature-loss weight", ge=0)
    lambda_unsup: float = Field(default=1.5e-3, description="Unlabeled-loss weight", ge=0)
    kernel: str = Field(default="lin", description="GP kernel name (lin, se, rq)")
    rq_alpha: float = Field(default=1.0, description="Rational-quadratic alpha", gt=0)
    gp_mode: GPMode = Field(
        default="syn2real++",
        description="off, syn2real (whole-latent) or syn2real++ (per-feature-map)",
    )
    sigma_eps2: float = Field(default=1.0, description="GP noise variance", gt=0)
    bank_max_entries: int = Field(default=256, description="Cap on feature-bank size", gt=0)
    unlabeled_ratio: int = Field(
        default=1, description="Unlabeled steps after every labeled step", ge=0
    )

    seed: int = Field(default=0, description="Run seed", ge=0, lt=2**64)
    workers: int = Field(default=1, description="Parallel workers for evaluation", ge=1)
    sample_images: int = Field(
        default=2, description="Epoch-end PNG triplets written per eval domain", ge=0
    )

    @field_validator("kernel")
    @classmethod
    def normalize_kernel(cls, v: str) -> str:
        return v.strip().lower()

    @model_validator(mode="after")
    def validate_gp_settings(self) -> "TrainConfig":
        if self.gp_mode != "off" and self.n_neighbors > self.bank_max_entries:
            raise ValueError(
                f"n_neighbors={self.n_neighbors} exceeds bank_max_entries={self.bank_max_entries}"
            )
        return self

    def loss_weights(self) -> LossWeights:
        return LossWeights(lambda_p=self.lambda_p, lambda_unsup=self.lambda_unsup)

    def lr_at(self, epoch: int) -> float:
        """Learning rate for a zero-based epoch: lr * decay^floor(epoch / decay_every)."""
        return self.lr * self.lr_decay ** (epoch // self.decay_every)
