"""Gradient tape: the recorded graph of one forward pass."""

from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Iterator, Optional

import numpy as np

if TYPE_CHECKING:
    from gpderain.tensor.tensor import Tensor

BackwardFn = Callable[[np.ndarray], tuple[Optional[np.ndarray], ...]]


@dataclass
class Node:
    """One recorded operation.

    `backward` maps the gradient of `output` to one gradient (or None) per input.
    Whatever the op needs for that is captured in its closure.
    """

    op: str
    inputs: tuple["Tensor", ...]
    output: "Tensor"
    backward: BackwardFn

    @property
    def input_ids(self) -> tuple[int, ...]:
        return tuple(t.id for t in self.inputs)

    @property
    def output_id(self) -> int:
        return self.output.id


@dataclass
class Tape:
    """Operations in execution order, which is a topological order."""

    nodes: list[Node] = field(default_factory=list)

    def record(self, node: Node) -> None:
        self.nodes.append(node)

    def reset(self) -> None:
        self.nodes.clear()

    def __len__(self) -> int:
        return len(self.nodes)


class _TapeState(threading.local):
    def __init__(self) -> None:
        self.tape = Tape()
        self.grad_enabled = True


_state = _TapeState()


def get_tape() -> Tape:
    """Return the calling thread's tape."""
    return _state.tape


def new_tape() -> Tape:
    """Discard whatever the current thread recorded and start an empty tape."""
    _state.tape = Tape()
    return _state.tape


def is_grad_enabled() -> bool:
    return _state.grad_enabled


@contextmanager
def no_grad() -> Iterator[None]:
    """Disable recording for the duration of the block."""
    previous = _state.grad_enabled
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous
