"""Adam optimizer and the step learning-rate schedule."""

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from gpderain.tensor import Tensor


@dataclass
class _AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0


@dataclass
class Adam:
    """Standard Adam with bias correction.

    State is kept per parameter (by tensor id), including the step count, so
    a parameter that is skipped in some steps gets the same update sequence
    it would get on its own.
    """

    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    _state: dict[int, _AdamState] = field(default_factory=dict, repr=False)

    def step(self, params: Iterable[Tensor], lr: float) -> int:
        """Update every parameter that has a gradient; return how many were updated."""
        updated = 0
        for param in params:
            if param.grad is None:
                continue
            state = self._state.get(param.id)
            if state is None:
                state = _AdamState(m=np.zeros_like(param.data), v=np.zeros_like(param.data))
                self._state[param.id] = state
            g = param.grad
            state.t += 1
            state.m = self.beta1 * state.m + (1.0 - self.beta1) * g
            state.v = self.beta2 * state.v + (1.0 - self.beta2) * g * g
            m_hat = state.m / (1.0 - self.beta1**state.t)
            v_hat = state.v / (1.0 - self.beta2**state.t)
            param.data = param.data - lr * m_hat / (np.sqrt(v_hat) + self.eps)
            updated += 1
        return updated


def step_lr(lr0: float, epoch: int, decay: float = 0.5, every: int = 30) -> float:
    """lr0 * decay^floor(epoch / every) for a zero-based epoch."""
    return lr0 * decay ** (epoch // every)
