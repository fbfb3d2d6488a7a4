"""Dense float64 tensor with tape-based reverse-mode differentiation."""

from __future__ import annotations

import itertools
from typing import Any, Optional, Sequence

import numpy as np

from gpderain.core.exceptions import TensorError
from gpderain.tensor.tape import BackwardFn, Node, get_tape, is_grad_enabled

_ids = itertools.count()


class Tensor:
    """N-dimensional float64 array that can take part in the gradient tape.

    `data` is a row-major numpy array; `grad`, once populated by `backward`,
    has the same shape. Op results only record themselves on the tape when
    gradients are enabled and at least one input requires a gradient.
    """

    __array_priority__ = 1000

    def __init__(self, data: Any, requires_grad: bool = False, name: Optional[str] = None):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self.id = next(_ids)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.data.size != 1:
            raise TensorError(
                "item() needs a single-element tensor", context={"shape": self.shape}
            )
        return float(self.data.reshape(()))

    def detach(self) -> "Tensor":
        """Return a constant tensor sharing this tensor's values."""
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        label = f", name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}{label})"

    # arithmetic delegates to gpderain.tensor.ops

    def __add__(self, other):
        return ops.add(self, other)

    def __radd__(self, other):
        return ops.add(other, self)

    def __sub__(self, other):
        return ops.sub(self, other)

    def __rsub__(self, other):
        return ops.sub(other, self)

    def __mul__(self, other):
        return ops.mul(self, other)

    def __rmul__(self, other):
        return ops.mul(other, self)

    def __truediv__(self, other):
        return ops.div(self, other)

    def __rtruediv__(self, other):
        return ops.div(other, self)

    def __neg__(self):
        return ops.neg(self)

    def __pow__(self, exponent: float):
        return ops.power(self, exponent)

    def __matmul__(self, other):
        return ops.matmul(self, other)

    def __getitem__(self, index):
        return ops.index(self, index)

    @property
    def T(self) -> "Tensor":
        return ops.transpose(self)

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        return ops.sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        return ops.mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return ops.reshape(self, shape)


def as_tensor(value: Any) -> Tensor:
    """Wrap non-tensors as constants; tensors pass through."""
    return value if isinstance(value, Tensor) else Tensor(value)


def make_result(
    op: str,
    data: np.ndarray,
    inputs: Sequence[Tensor],
    backward: BackwardFn,
) -> Tensor:
    """Create an op result and record it when any input needs a gradient."""
    needs_grad = is_grad_enabled() and any(t.requires_grad for t in inputs)
    out = Tensor(data, requires_grad=needs_grad)
    if needs_grad:
        get_tape().record(Node(op=op, inputs=tuple(inputs), output=out, backward=backward))
    return out


def backward(loss: Tensor) -> None:
    """Populate `.grad` on every leaf tensor the scalar `loss` depends on.

    Walks the tape once in reverse and then clears it, so a second call
    without a new forward pass fails.

    Args:
        loss: Single-element tensor produced by recorded ops

    Raises:
        TensorError: If loss is not scalar, the tape is empty, or loss is not on the tape
    """
    if loss.data.size != 1:
        raise TensorError("backward needs a scalar loss", context={"shape": loss.shape})

    tape = get_tape()
    if not tape.nodes:
        raise TensorError("backward called on an empty tape; run a forward pass first")
    if not loss.requires_grad:
        raise TensorError("loss does not depend on any tensor that requires grad")

    grads: dict[int, np.ndarray] = {loss.id: np.ones_like(loss.data)}
    produced: set[int] = set()
    leaves: dict[int, Tensor] = {}

    for node in reversed(tape.nodes):
        produced.add(node.output.id)
        upstream = grads.pop(node.output.id, None)
        if upstream is None:
            continue
        input_grads = node.backward(upstream)
        for tensor, grad in zip(node.inputs, input_grads):
            if grad is None or not tensor.requires_grad:
                continue
            if tensor.id in grads:
                grads[tensor.id] = grads[tensor.id] + grad
            else:
                grads[tensor.id] = grad
            leaves[tensor.id] = tensor

    for tensor_id, grad in grads.items():
        if tensor_id in produced or tensor_id not in leaves:
            continue
        tensor = leaves[tensor_id]
        tensor.grad = grad if tensor.grad is None else tensor.grad + grad

    tape.reset()


from gpderain.tensor import ops  # noqa: E402
