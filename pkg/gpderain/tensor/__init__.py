"""Dense float64 tensors with tape-based reverse-mode differentiation."""

from gpderain.tensor import ops
from gpderain.tensor.module import Module, Parameter
from gpderain.tensor.tape import Node, Tape, get_tape, is_grad_enabled, new_tape, no_grad
from gpderain.tensor.tensor import Tensor, as_tensor, backward

__all__ = [
    "Module",
    "Node",
    "Parameter",
    "Tape",
    "Tensor",
    "as_tensor",
    "backward",
    "get_tape",
    "is_grad_enabled",
    "new_tape",
    "no_grad",
    "ops",
]
