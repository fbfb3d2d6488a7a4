"""Kernel registry and Gram matrices.

Each kernel has a numpy path for constant matrices and a tensor path that
keeps the dependence on its first argument differentiable.
"""

from typing import Callable, Optional, Protocol, Union, overload, runtime_checkable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.spatial.distance import cdist

from gpderain.core.exceptions import GPError, ShapeError
from gpderain.tensor import Tensor, as_tensor, ops

ArrayOrTensor = Union[np.ndarray, Tensor]


class KernelSpec(BaseModel):
    """Kernel choice and hyperparameters. LIN ignores both hyperparameters."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: str = Field(default="lin", description="Registered kernel name")
    length_scale: float = Field(default=1.0, description="SE/RQ length scale", gt=0)
    alpha: float = Field(default=1.0, description="RQ shape parameter", gt=0)


@runtime_checkable
class Kernel(Protocol):
    """Protocol for registered kernels."""

    def matrix(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Gram matrix of row sets a [n, d] and b [m, d] as constants."""
        ...

    def tensor_matrix(self, a: Tensor, b: ArrayOrTensor) -> Tensor:
        """Gram matrix differentiable in a (and in b when it is a tensor)."""
        ...


KernelFactory = Callable[[KernelSpec], Kernel]

_kernel_registry: dict[str, KernelFactory] = {}


@overload
def register_kernel(name: str) -> Callable[[KernelFactory], KernelFactory]: ...


@overload
def register_kernel(name: str, factory: KernelFactory) -> None: ...


def register_kernel(
    name: str, factory: KernelFactory | None = None
) -> Callable[[KernelFactory], KernelFactory] | None:
    """Register a kernel factory, as a decorator or by direct call.

    Raises:
        GPError: If a kernel with the same name is already registered
    """

    def _register(f: KernelFactory) -> KernelFactory:
        if name in _kernel_registry:
            raise GPError(f"Kernel '{name}' is already registered", context={"kernel": name})
        _kernel_registry[name] = f
        return f

    if factory is not None:
        _register(factory)
        return None
    return _register


def get_kernel(spec: KernelSpec) -> Kernel:
    """Instantiate the registered kernel named by `spec.kind`.

    Raises:
        GPError: If the kernel is not registered
    """
    factory = _kernel_registry.get(spec.kind)
    if factory is None:
        available = ", ".join(list_kernels()) or "(none)"
        raise GPError(
            f"Unknown kernel: '{spec.kind}'",
            context={"kernel": spec.kind, "available_kernels": available},
        )
    return factory(spec)


def list_kernels() -> list[str]:
    return sorted(_kernel_registry)


def _check_dims(a_dim: int, b_dim: int) -> None:
    if a_dim != b_dim:
        raise ShapeError(
            f"kernel inputs have different vector dimensions: {a_dim} vs {b_dim}",
            context={"a_dim": a_dim, "b_dim": b_dim},
        )


def _sq_dist_tensor(a: Tensor, b: Tensor) -> Tensor:
    """|a_i|^2 + |b_j|^2 - 2 a_i.b_j as a tensor expression."""
    a_sq = ops.sum(ops.square(a), axis=1, keepdims=True)
    b_sq = ops.reshape(ops.sum(ops.square(b), axis=1), (1, b.shape[0]))
    return a_sq + b_sq - 2.0 * ops.matmul(a, ops.transpose(b))


class LinearKernel:
    """Normalized inner product <a, b> / (|a| |b|); 0 when either vector is zero."""

    def __init__(self, spec: KernelSpec):
        self.spec = spec

    @staticmethod
    def _normalize(x: np.ndarray) -> np.ndarray:
        norms = np.linalg.norm(x, axis=1, keepdims=True)
        return x / np.where(norms > 0, norms, 1.0)

    def matrix(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self._normalize(a) @ self._normalize(b).T

    def tensor_matrix(self, a: Tensor, b: ArrayOrTensor) -> Tensor:
        b = as_tensor(b)
        return ops.matmul(ops.row_normalize(a), ops.transpose(ops.row_normalize(b)))


class SquaredExponentialKernel:
    """exp(-|a - b|^2 / (2 l^2))."""

    def __init__(self, spec: KernelSpec):
        self.spec = spec

    def matrix(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        d2 = cdist(a, b, "sqeuclidean")
        return np.exp(-d2 / (2.0 * self.spec.length_scale**2))

    def tensor_matrix(self, a: Tensor, b: ArrayOrTensor) -> Tensor:
        d2 = _sq_dist_tensor(a, as_tensor(b))
        return ops.exp(ops.scale(d2, -1.0 / (2.0 * self.spec.length_scale**2)))


class RationalQuadraticKernel:
    """(1 + |a - b|^2 / (2 alpha l^2))^(-alpha)."""

    def __init__(self, spec: KernelSpec):
        self.spec = spec

    def matrix(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        d2 = cdist(a, b, "sqeuclidean")
        denom = 2.0 * self.spec.alpha * self.spec.length_scale**2
        return (1.0 + d2 / denom) ** (-self.spec.alpha)

    def tensor_matrix(self, a: Tensor, b: ArrayOrTensor) -> Tensor:
        d2 = _sq_dist_tensor(a, as_tensor(b))
        denom = 2.0 * self.spec.alpha * self.spec.length_scale**2
        return ops.power(1.0 + ops.scale(d2, 1.0 / denom), -self.spec.alpha)


register_kernel("lin", LinearKernel)
register_kernel("se", SquaredExponentialKernel)
register_kernel("rq", RationalQuadraticKernel)


def gram(spec: KernelSpec, a, b) -> np.ndarray:
    """Kernel matrix with entry (i, j) = k(a_i, b_j).

    Args:
        spec: Kernel spec
        a: Rows [n, d]
        b: Rows [m, d]

    Returns:
        [n, m] matrix

    Raises:
        ShapeError: If the row dimensions differ
    """
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    _check_dims(a.shape[1], b.shape[1])
    return get_kernel(spec).matrix(a, b)


def gram_tensor(spec: KernelSpec, a: Tensor, b: ArrayOrTensor) -> Tensor:
    """Differentiable `gram` for a tensor first argument."""
    _check_dims(a.shape[1], np.shape(b.data if isinstance(b, Tensor) else b)[1])
    return get_kernel(spec).tensor_matrix(a, b)


def kernel_eval(spec: KernelSpec, a, b) -> float:
    """Kernel value for two vectors.

    Raises:
        ShapeError: If len(a) != len(b)
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    _check_dims(a.size, b.size)
    return float(gram(spec, a[None, :], b[None, :])[0, 0])


def median_length_scale(
    rows: np.ndarray, seed: int, max_rows: int = 1024, fallback: float = 1.0
) -> float:
    """Median pairwise Euclidean distance over a seeded subset of rows.

    Args:
        rows: Candidate rows [n, d]
        seed: Subset seed
        max_rows: Subset cap
        fallback: Returned when the median is zero or undefined

    Returns:
        Positive length scale
    """
    rows = np.asarray(rows, dtype=np.float64)
    if rows.shape[0] > max_rows:
        pick = np.random.default_rng(seed).choice(rows.shape[0], max_rows, replace=False)
        rows = rows[np.sort(pick)]
    if rows.shape[0] < 2:
        return fallback
    dists = cdist(rows, rows, "euclidean")[np.triu_indices(rows.shape[0], k=1)]
    value = float(np.median(dists))
    return value if value > 0 else fallback


def resolve_kernel_spec(
    kind: str, rows: Optional[np.ndarray] = None, seed: int = 0, alpha: float = 1.0
) -> KernelSpec:
    """Build a KernelSpec, taking SE/RQ length scales from the median heuristic."""
    if kind == "lin" or rows is None:
        return KernelSpec(kind=kind, alpha=alpha)
    return KernelSpec(kind=kind, length_scale=median_length_scale(rows, seed), alpha=alpha)
