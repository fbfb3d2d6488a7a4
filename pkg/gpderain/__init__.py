"""gpderain - Gaussian-process semi-supervised image deraining.

Trains a residue-predicting encoder/decoder on labeled synthetic rain and
adapts its encoder to an unlabeled rain domain through GP pseudo labels
computed from a bank of labeled latents.
"""

__version__ = "0.1.0"

# Public API
from gpderain.api import (
    derain_image,
    evaluate_checkpoint,
    from_config,
    inspect_gp,
    synthesize,
    train,
    write_initial_checkpoint,
)

# Exceptions
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
from gpderain.core.metrics import RunLog
from gpderain.gp.bank import FeatureBank
from gpderain.model.network import DerainNet

# Config models
from gpderain.models.run_spec import RunSpec

__all__ = [
    # Version
    "__version__",
    # Public API
    "from_config",
    "synthesize",
    "train",
    "evaluate_checkpoint",
    "derain_image",
    "inspect_gp",
    "write_initial_checkpoint",
    # Core classes
    "RunSpec",
    "DerainNet",
    "FeatureBank",
    "RunLog",
    # Exceptions
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
