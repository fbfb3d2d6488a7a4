"""Res2Net-style multi-scale residual block."""

from gpderain.core.exceptions import ShapeError
from gpderain.model.layers import Conv2d
from gpderain.tensor import Module, Tensor, ops


class Res2Block(Module):
    """Multi-scale residual block with `scale` hierarchical 3x3 branches.

    A 1x1 entry conv maps the input to `out_channels` interior channels,
    which are split into `scale` groups. Group 0 passes through; group i>0
    goes through its own 3x3 conv after adding the previous group's output.
    The groups are concatenated, mixed by a 1x1 exit conv, and added to the
    skip path (identity, or a 1x1 projection when channel counts differ).
    No activation follows the sum.

    Args:
        in_channels: Input channels
        out_channels: Output and interior channels; divisible by scale
        scale: Number of groups
        slope: Leaky ReLU slope used after the entry conv and each branch
    """

    def __init__(self, in_channels: int, out_channels: int, scale: int = 4, slope: float = 0.2):
        super().__init__()
        if out_channels % scale:
            raise ShapeError(
                f"Res2Block interior channels {out_channels} not divisible by scale {scale}",
                context={"out_channels": out_channels, "scale": scale},
            )
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.scale = scale
        self.slope = slope

        self.entry = self.add_module("entry", Conv2d(in_channels, out_channels, 1))
        width = out_channels // scale
        self.branches = [
            self.add_module(f"branch{i}", Conv2d(width, width, 3)) for i in range(1, scale)
        ]
        self.exit = self.add_module("exit", Conv2d(out_channels, out_channels, 1))
        self.skip = (
            self.add_module("skip", Conv2d(in_channels, out_channels, 1))
            if in_channels != out_channels
            else None
        )

    def forward(self, x: Tensor) -> Tensor:
        hidden = ops.leaky_relu(self.entry(x), self.slope)
        groups = ops.split_axis(hidden, self.scale, axis=1)

        outputs = [groups[0]]
        previous = None
        for group, branch in zip(groups[1:], self.branches):
            branch_in = group if previous is None else group + previous
            previous = ops.leaky_relu(branch(branch_in), self.slope)
            outputs.append(previous)

        mixed = self.exit(ops.concat(outputs, axis=1))
        residual = x if self.skip is None else self.skip(x)
        return mixed + residual
