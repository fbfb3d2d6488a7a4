"""Exception hierarchy for the gpderain package."""


class GPDerainError(Exception):
    """Base exception for all gpderain errors."""

    def __init__(self, message: str, context: dict | None = None):
        super().__init__(message)
        self.message = message
        self.context = context or {}

    def __str__(self) -> str:
        if self.context:
            context_str = ", ".join(f"{k}={v}" for k, v in self.context.items())
            return f"{self.message} ({context_str})"
        return self.message


class ConfigError(GPDerainError):
    """Raised when a run config cannot be parsed, merged or validated."""

    pass


class TensorError(GPDerainError):
    """Raised when a tensor operation or backward pass is invalid."""

    pass


class ShapeError(TensorError):
    """Raised when tensor shapes do not line up."""

    pass


class GPError(GPDerainError):
    """Raised when the Gaussian-process pseudo-label engine fails."""

    pass


class FactorizationError(GPError):
    """Raised when a Cholesky factorization fails after jitter escalation."""

    pass


class DataError(GPDerainError):
    """Raised when images, manifests or rain parameters are unusable."""

    pass


class CheckpointError(GPDerainError):
    """Raised when checkpoints or bank dumps cannot be written or read."""

    pass


class TrainingError(GPDerainError):
    """Raised when a training step has to abort."""

    pass
