"""Checkpoint save/load for DerainNet."""

import logging
from typing import Any, Optional

from pydantic import ValidationError

from gpderain.core import storage
from gpderain.core.exceptions import CheckpointError, ShapeError
from gpderain.model.network import DerainNet
from gpderain.models.model_config import ModelConfig

logger = logging.getLogger(__name__)

CHECKPOINT_KIND = "checkpoint"


def save_checkpoint(
    path: str, net: DerainNet, extra: Optional[dict[str, Any]] = None
) -> None:
    """Atomically write the network config and all named parameters.

    Args:
        path: Target file
        net: Network to save
        extra: JSON-serializable metadata stored alongside (epoch, run name, ...)
    """
    metadata = {"model": net.config.model_dump(mode="json"), "extra": extra or {}}
    storage.write_tensors(path, net.state_dict(), kind=CHECKPOINT_KIND, metadata=metadata)
    logger.info("Checkpoint written", extra={"path": str(path)})


def load_checkpoint(
    path: str, config: Optional[ModelConfig] = None
) -> tuple[DerainNet, dict[str, Any]]:
    """Rebuild a network from a checkpoint.

    Args:
        path: Checkpoint file
        config: Build this config instead of the stored one; its parameter
            shapes must match the stored tensors

    Returns:
        (network, extra metadata)

    Raises:
        CheckpointError: If the file is unreadable or not a checkpoint
        ShapeError: If `config` disagrees with the stored parameter shapes
    """
    tensors, metadata = storage.read_tensors(path, kind=CHECKPOINT_KIND)
    if config is None:
        try:
            config = ModelConfig(**metadata.get("model", {}))
        except ValidationError as e:
            raise CheckpointError(
                f"Checkpoint carries an invalid model config: {e}", context={"path": str(path)}
            ) from e

    net = DerainNet(config)
    try:
        net.load_state_dict(tensors)
    except ShapeError as e:
        e.context["path"] = str(path)
        raise
    return net, metadata.get("extra", {})
