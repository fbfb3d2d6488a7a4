"""Latent matrix view of encoder feature maps."""

from dataclasses import dataclass

import numpy as np

from gpderain.core.exceptions import ShapeError


@dataclass(frozen=True)
class LatentMatrix:
    """M feature maps of side s, held as an M x D matrix (D = s*s).

    Row m is the row-major flattening of feature map m.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.ndim != 2:
            raise ShapeError(
                "latent matrix must be 2-D", context={"shape": self.values.shape}
            )

    @classmethod
    def from_feature_maps(cls, maps: np.ndarray) -> "LatentMatrix":
        maps = np.asarray(maps, dtype=np.float64)
        if maps.ndim != 3 or maps.shape[1] != maps.shape[2]:
            raise ShapeError(
                "feature maps must be [M, s, s]", context={"shape": maps.shape}
            )
        return cls(maps.reshape(maps.shape[0], -1))

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    def to_feature_maps(self) -> np.ndarray:
        side = int(round(np.sqrt(self.cols)))
        if side * side != self.cols:
            raise ShapeError(
                f"D={self.cols} is not a square spatial size", context={"cols": self.cols}
            )
        return self.values.reshape(self.rows, side, side)

    def flatten(self) -> np.ndarray:
        """Whole-latent vector of length M*D."""
        return self.values.ravel()
