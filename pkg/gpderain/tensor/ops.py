"""Differentiable tensor operations.

Every op computes its forward value with numpy and hands `make_result` a
closure mapping the output gradient to input gradients. Binary elementwise
ops broadcast like numpy; their gradients are summed back to input shape.
"""

from __future__ import annotations

import builtins
from typing import Any, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import linalg

from gpderain.core.exceptions import ShapeError, TensorError
from gpderain.tensor.tensor import Tensor, as_tensor, make_result


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to `shape`."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


# elementwise


def add(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def _backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return make_result("add", a.data + b.data, (a, b), _backward)


def sub(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def _backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return make_result("sub", a.data - b.data, (a, b), _backward)


def mul(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def _backward(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return make_result("mul", a.data * b.data, (a, b), _backward)


def div(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data / b.data

    def _backward(g):
        return (
            _unbroadcast(g / b.data, a.shape),
            _unbroadcast(-g * out / b.data, b.shape),
        )

    return make_result("div", out, (a, b), _backward)


def neg(a: Tensor) -> Tensor:
    return make_result("neg", -a.data, (a,), lambda g: (-g,))


def scale(a: Tensor, factor: float) -> Tensor:
    """Multiply by a Python scalar."""
    return make_result("scale", a.data * factor, (a,), lambda g: (g * factor,))


def power(a: Tensor, exponent: float) -> Tensor:
    def _backward(g):
        return (g * exponent * a.data ** (exponent - 1),)

    return make_result("power", a.data**exponent, (a,), _backward)


def square(a: Tensor) -> Tensor:
    return make_result("square", a.data * a.data, (a,), lambda g: (2.0 * g * a.data,))


def exp(a: Tensor) -> Tensor:
    out = np.exp(a.data)
    return make_result("exp", out, (a,), lambda g: (g * out,))


def log(a: Tensor) -> Tensor:
    if np.any(a.data <= 0):
        raise TensorError("log of a non-positive value", context={"min": float(a.data.min())})
    return make_result("log", np.log(a.data), (a,), lambda g: (g / a.data,))


def abs(a: Tensor) -> Tensor:
    return make_result("abs", np.abs(a.data), (a,), lambda g: (g * np.sign(a.data),))


def leaky_relu(a: Tensor, slope: float = 0.2) -> Tensor:
    """x for x >= 0, slope * x otherwise; the gradient at exactly 0 is 1."""
    if not 0.0 < slope < 1.0:
        raise TensorError("leaky_relu slope must lie in (0, 1)", context={"slope": slope})
    positive = a.data >= 0
    factor = np.where(positive, 1.0, slope)
    return make_result("leaky_relu", a.data * factor, (a,), lambda g: (g * factor,))


def clamp(a: Any, low: float, high: float) -> Tensor:
    """Clip values into [low, high]; evaluation only, never recorded."""
    return Tensor(np.clip(as_tensor(a).data, low, high))


# reductions and reshaping


def sum(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    out = a.data.sum(axis=axis, keepdims=keepdims)

    def _backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return make_result("sum", out, (a,), _backward)


def mean(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    if axis is None:
        count = a.size
    else:
        axes = (axis,) if isinstance(axis, int) else tuple(axis)
        count = int(np.prod([a.shape[ax] for ax in axes]))
    return scale(sum(a, axis=axis, keepdims=keepdims), 1.0 / count)


def abs_sum(a: Tensor) -> Tensor:
    return sum(abs(a))


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    try:
        out = a.data.reshape(shape)
    except ValueError as e:
        raise ShapeError(
            f"cannot reshape {a.shape} into {tuple(shape)}",
            context={"from": a.shape, "to": tuple(shape)},
        ) from e
    return make_result("reshape", out, (a,), lambda g: (g.reshape(a.shape),))


def transpose(a: Tensor, axes: Sequence[int] | None = None) -> Tensor:
    out = np.transpose(a.data, axes)

    def _backward(g):
        if axes is None:
            return (np.transpose(g),)
        return (np.transpose(g, np.argsort(axes)),)

    return make_result("transpose", out, (a,), _backward)


def index(a: Tensor, key) -> Tensor:
    out = a.data[key]

    def _backward(g):
        full = np.zeros_like(a.data)
        np.add.at(full, key, g)
        return (full,)

    return make_result("index", np.array(out), (a,), _backward)


def concat(tensors: Sequence[Tensor], axis: int = 1) -> Tensor:
    """Concatenate along an axis (channels by default)."""
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    bounds = np.cumsum([0] + sizes)

    def _backward(g):
        return tuple(
            np.take(g, np.arange(bounds[i], bounds[i + 1]), axis=axis)
            for i in range(len(tensors))
        )

    return make_result(
        "concat", np.concatenate([t.data for t in tensors], axis=axis), tensors, _backward
    )


def slice_axis(a: Tensor, start: int, stop: int, axis: int = 1) -> Tensor:
    """Take [start, stop) along an axis (channels by default)."""
    key = [builtins.slice(None)] * a.ndim
    key[axis] = builtins.slice(start, stop)
    return index(a, tuple(key))


def split_axis(a: Tensor, parts: int, axis: int = 1) -> list[Tensor]:
    size = a.shape[axis]
    if size % parts:
        raise ShapeError(
            f"axis {axis} of size {size} does not split into {parts} equal parts",
            context={"shape": a.shape, "parts": parts},
        )
    step = size // parts
    return [slice_axis(a, i * step, (i + 1) * step, axis) for i in range(parts)]


# linear algebra


def matmul(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError("matmul expects 2-D operands", context={"a": a.shape, "b": b.shape})
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"matmul inner dimensions differ: {a.shape[1]} vs {b.shape[0]}",
            context={"a": a.shape, "b": b.shape},
        )

    def _backward(g):
        return g @ b.data.T, a.data.T @ g

    return make_result("matmul", a.data @ b.data, (a, b), _backward)


def row_normalize(a: Tensor) -> Tensor:
    """Scale each row of a 2-D tensor to unit length; all-zero rows stay zero."""
    norms = np.sqrt(np.einsum("ij,ij->i", a.data, a.data))[:, None]
    safe = np.where(norms > 0, norms, 1.0)
    out = a.data / safe

    def _backward(g):
        radial = np.einsum("ij,ij->i", out, g)[:, None]
        return ((g - out * radial) / safe,)

    return make_result("row_normalize", out, (a,), _backward)


def cho_solve(factor: tuple[np.ndarray, bool], b: Any) -> Tensor:
    """Solve G X = B for a constant SPD G given its `scipy.linalg.cho_factor`."""
    b = as_tensor(b)
    out = linalg.cho_solve(factor, b.data)
    return make_result("cho_solve", out, (b,), lambda g: (linalg.cho_solve(factor, g),))


def _spd_factor(a: Tensor) -> tuple[np.ndarray, bool]:
    try:
        return linalg.cho_factor(a.data, lower=True)
    except linalg.LinAlgError as e:
        raise TensorError(
            "matrix is not positive definite", context={"shape": a.shape}
        ) from e


def spd_solve(a: Any, b: Any) -> Tensor:
    """Solve A X = B for symmetric positive-definite A, differentiable in A and B."""
    a, b = as_tensor(a), as_tensor(b)
    factor = _spd_factor(a)
    out = linalg.cho_solve(factor, b.data)

    def _backward(g):
        grad_b = linalg.cho_solve(factor, g)
        grad_a = -(grad_b @ out.T) if out.ndim == 2 else -np.outer(grad_b, out)
        return grad_a, grad_b

    return make_result("spd_solve", out, (a, b), _backward)


def spd_logdet(a: Any) -> Tensor:
    """log |A| for symmetric positive-definite A."""
    a = as_tensor(a)
    factor = _spd_factor(a)
    value = 2.0 * np.sum(np.log(np.diag(factor[0])))

    def _backward(g):
        inverse = linalg.cho_solve(factor, np.eye(a.shape[0]))
        return (g * inverse,)

    return make_result("spd_logdet", np.asarray(value), (a,), _backward)


# image ops


def conv2d(x: Tensor, weight: Tensor, bias: Tensor | None = None, padding: int = 0) -> Tensor:
    """2-D cross-correlation, stride 1, zero padding.

    Args:
        x: Input [N, Cin, H, W]
        weight: Kernel [Cout, Cin, k, k]
        bias: Optional bias [Cout]
        padding: Zero padding on each side; (k - 1) / 2 preserves H and W

    Returns:
        Output [N, Cout, H + 2p - k + 1, W + 2p - k + 1]

    Raises:
        ShapeError: If ranks or channel counts disagree
    """
    if x.ndim != 4:
        raise ShapeError("conv2d input must be [N, C, H, W]", context={"input": x.shape})
    if weight.ndim != 4 or weight.shape[2] != weight.shape[3]:
        raise ShapeError(
            "conv2d weight must be [Cout, Cin, k, k]", context={"weight": weight.shape}
        )
    cout, cin, k, _ = weight.shape
    if x.shape[1] != cin:
        raise ShapeError(
            f"conv2d input channels (Cin={x.shape[1]}) do not match weight in_channels ({cin})",
            context={"input": x.shape, "weight": weight.shape},
        )
    if bias is not None and bias.shape != (cout,):
        raise ShapeError(
            f"conv2d bias must have Cout={cout} entries",
            context={"bias": bias.shape, "weight": weight.shape},
        )
    height, width = x.shape[2] + 2 * padding - k + 1, x.shape[3] + 2 * padding - k + 1
    if height < 1 or width < 1:
        raise ShapeError(
            "conv2d kernel larger than padded input",
            context={"input": x.shape, "kernel": k, "padding": padding},
        )

    pad = ((0, 0), (0, 0), (padding, padding), (padding, padding))
    padded = np.pad(x.data, pad)
    windows = sliding_window_view(padded, (k, k), axis=(2, 3))
    out = np.tensordot(windows, weight.data, axes=([1, 4, 5], [1, 2, 3]))
    out = np.ascontiguousarray(out.transpose(0, 3, 1, 2))
    if bias is not None:
        out = out + bias.data[None, :, None, None]

    def _backward(g):
        grad_w = np.tensordot(g, windows, axes=([0, 2, 3], [0, 2, 3]))
        back = k - 1
        g_padded = np.pad(g, ((0, 0), (0, 0), (back, back), (back, back)))
        g_windows = sliding_window_view(g_padded, (k, k), axis=(2, 3))
        flipped = weight.data[:, :, ::-1, ::-1]
        grad_padded = np.tensordot(g_windows, flipped, axes=([1, 4, 5], [0, 2, 3]))
        grad_padded = grad_padded.transpose(0, 3, 1, 2)
        h_end = grad_padded.shape[2] - padding
        w_end = grad_padded.shape[3] - padding
        grad_x = np.ascontiguousarray(grad_padded[:, :, padding:h_end, padding:w_end])
        grad_b = g.sum(axis=(0, 2, 3)) if bias is not None else None
        return (grad_x, grad_w, grad_b)

    inputs = (x, weight, bias) if bias is not None else (x, weight)
    return make_result("conv2d", out, inputs, _backward)


def avg_pool2(x: Tensor) -> Tensor:
    """Average over non-overlapping 2x2 blocks."""
    if x.ndim != 4:
        raise ShapeError("avg_pool2 input must be [N, C, H, W]", context={"input": x.shape})
    n, c, h, w = x.shape
    if h % 2 or w % 2:
        raise ShapeError(
            f"avg_pool2 needs even spatial dims, got H={h}, W={w}", context={"input": x.shape}
        )
    out = x.data.reshape(n, c, h // 2, 2, w // 2, 2).mean(axis=(3, 5))

    def _backward(g):
        return (np.repeat(np.repeat(g, 2, axis=2), 2, axis=3) * 0.25,)

    return make_result("avg_pool2", out, (x,), _backward)


def upsample_nearest2(x: Tensor) -> Tensor:
    """Replicate every value into a 2x2 block."""
    if x.ndim != 4:
        raise ShapeError("upsample input must be [N, C, H, W]", context={"input": x.shape})
    n, c, h, w = x.shape
    out = np.repeat(np.repeat(x.data, 2, axis=2), 2, axis=3)

    def _backward(g):
        return (g.reshape(n, c, h, 2, w, 2).sum(axis=(3, 5)),)

    return make_result("upsample_nearest2", out, (x,), _backward)
