"""Parameter containers: named, ordered trees of trainable tensors."""

from __future__ import annotations

from typing import Iterator, Optional

import numpy as np

from gpderain.core.exceptions import ShapeError
from gpderain.tensor.tensor import Tensor


class Parameter(Tensor):
    """A trainable leaf tensor; always requires a gradient."""

    def __init__(self, data, name: Optional[str] = None):
        super().__init__(data, requires_grad=True, name=name)


class Module:
    """Base class for layers and networks.

    Parameters and submodules are registered explicitly and iterated in
    registration order, so parameter names and ordering are stable across
    runs and checkpoints.
    """

    def __init__(self) -> None:
        self._parameters: dict[str, Parameter] = {}
        self._modules: dict[str, Module] = {}

    def add_parameter(self, name: str, shape: tuple[int, ...]) -> Parameter:
        """Register a zero-filled parameter of the given shape."""
        param = Parameter(np.zeros(shape), name=name)
        self._parameters[name] = param
        return param

    def add_module(self, name: str, module: "Module") -> "Module":
        self._modules[name] = module
        return module

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, Parameter]]:
        for name, param in self._parameters.items():
            yield f"{prefix}{name}", param
        for name, module in self._modules.items():
            yield from module.named_parameters(prefix=f"{prefix}{name}.")

    def parameters(self) -> list[Parameter]:
        return [p for _, p in self.named_parameters()]

    def zero_grad(self) -> None:
        for param in self.parameters():
            param.zero_grad()

    def state_dict(self) -> dict[str, np.ndarray]:
        """Copy every parameter's values, keyed by dotted name."""
        return {name: param.data.copy() for name, param in self.named_parameters()}

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        """Overwrite parameter values in place.

        Raises:
            ShapeError: If names are missing or unexpected, or a shape differs
        """
        params = dict(self.named_parameters())
        missing = sorted(set(params) - set(state))
        unexpected = sorted(set(state) - set(params))
        if missing or unexpected:
            raise ShapeError(
                "parameter names do not match the model",
                context={"missing": missing[:5], "unexpected": unexpected[:5]},
            )
        for name, param in params.items():
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != param.shape:
                raise ShapeError(
                    f"parameter {name} has shape {value.shape}, model expects {param.shape}",
                    context={"name": name, "stored": value.shape, "model": param.shape},
                )
            param.data = value.copy()

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def forward(self, *args, **kwargs):
        raise NotImplementedError
