"""Core module for gpderain: errors, logging, run logs, storage, parallelism."""

from gpderain.core.exceptions import (
    CheckpointError,
    ConfigError,
    DataError,
    FactorizationError,
    GPDerainError,
    GPError,
    ShapeError,
    TensorError,
    TrainingError,
)
from gpderain.core.metrics import EpochRecord, RunLog, read_runlog
from gpderain.core.parallel import AsyncParallelExecutor, parallel_map

__all__ = [
    "AsyncParallelExecutor",
    "parallel_map",
    "EpochRecord",
    "RunLog",
    "read_runlog",
    "GPDerainError",
    "ConfigError",
    "TensorError",
    "ShapeError",
    "GPError",
    "FactorizationError",
    "DataError",
    "CheckpointError",
    "TrainingError",
]
