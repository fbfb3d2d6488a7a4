"""Configuration models and the config-file loader."""

from gpderain.models.loader import load_run_spec
from gpderain.models.merger import merge_configs, overrides_from_flags
from gpderain.models.model_config import ModelConfig
from gpderain.models.rain_config import DomainConfig, RainParams, SynthConfig
from gpderain.models.run_spec import DataConfig, RunSpec
from gpderain.models.train_config import GPMode, LossWeights, TrainConfig

__all__ = [
    "RunSpec",
    "ModelConfig",
    "TrainConfig",
    "LossWeights",
    "GPMode",
    "RainParams",
    "DomainConfig",
    "SynthConfig",
    "DataConfig",
    "load_run_spec",
    "merge_configs",
    "overrides_from_flags",
]
