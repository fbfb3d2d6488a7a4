"""Basic layers built on the tensor ops."""

from gpderain.core.exceptions import ShapeError
from gpderain.tensor import Module, Tensor, ops


class Conv2d(Module):
    """k x k convolution with zero same-padding and a bias."""

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int = 3):
        super().__init__()
        if kernel_size % 2 == 0:
            raise ShapeError(
                "kernel_size must be odd for same-padding", context={"kernel_size": kernel_size}
            )
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = kernel_size
        self.weight = self.add_parameter(
            "weight", (out_channels, in_channels, kernel_size, kernel_size)
        )
        self.bias = self.add_parameter("bias", (out_channels,))

    @property
    def fan_in(self) -> int:
        return self.in_channels * self.kernel_size**2

    def forward(self, x: Tensor) -> Tensor:
        return ops.conv2d(x, self.weight, self.bias, padding=(self.kernel_size - 1) // 2)


class LeakyReLU(Module):
    def __init__(self, slope: float = 0.2):
        super().__init__()
        self.slope = slope

    def forward(self, x: Tensor) -> Tensor:
        return ops.leaky_relu(x, self.slope)


class Downsample(Module):
    """2x2 average pooling."""

    def forward(self, x: Tensor) -> Tensor:
        return ops.avg_pool2(x)


class Upsample(Module):
    """Nearest-neighbour 2x upsampling."""

    def forward(self, x: Tensor) -> Tensor:
        return ops.upsample_nearest2(x)
