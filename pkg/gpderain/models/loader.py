"""Config loader with JSON/YAML parsing and inheritance resolution."""

import os
from pathlib import Path
from typing import Any, Dict, Optional, Set

import yaml
from pydantic import ValidationError

from gpderain.core.exceptions import ConfigError
from gpderain.models.merger import merge_configs
from gpderain.models.run_spec import RunSpec

# Dotted keys holding paths that resolve against the declaring file's directory
_PATH_KEYS = ("data.labeled", "data.unlabeled", "synth.base_images")


def load_run_spec(
    path: Optional[str] = None, overrides: Dict[str, Any] | None = None
) -> RunSpec:
    """
    Load a run config with inheritance resolution and flag overrides.

    Args:
        path: Path to a JSON or YAML config file; None starts from defaults
        overrides: Nested dict merged over the resolved file (CLI flags)

    Returns:
        Fully resolved RunSpec

    Raises:
        ConfigError: If the file is missing, unparsable, cyclic or invalid
    """
    config_dict: Dict[str, Any] = {}
    if path is not None:
        config_path = Path(path)
        if not config_path.exists():
            raise ConfigError(f"Config file not found: {path}", context={"path": str(path)})
        config_dict = _load_recursive(config_path, set())

    if overrides:
        config_dict = merge_configs(config_dict, overrides)

    try:
        return RunSpec.from_dict(config_dict)
    except ValidationError as e:
        raise ConfigError(
            f"Config validation failed: {e}", context={"path": str(path)}
        ) from e


def _load_recursive(config_path: Path, visited: Set[str]) -> Dict[str, Any]:
    """
    Recursively load a config file and resolve its `extends` chain.

    Args:
        config_path: Path to the current config file
        visited: Already visited config paths (for cycle detection)

    Returns:
        Merged config dictionary

    Raises:
        ConfigError: If a cycle is detected, a file is missing, or parsing fails
    """
    abs_path = config_path.resolve()
    abs_path_str = str(abs_path)

    if abs_path_str in visited:
        cycle = " -> ".join(sorted(visited)) + f" -> {abs_path_str}"
        raise ConfigError(
            f"Cycle detected in config inheritance: {cycle}",
            context={"path": str(config_path)},
        )
    visited.add(abs_path_str)

    try:
        with open(abs_path, "r", encoding="utf-8") as f:
            config_dict = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError(
            f"Config file not found: {abs_path}", context={"path": str(config_path)}
        )
    except yaml.YAMLError as e:
        raise ConfigError(
            f"Invalid JSON/YAML in config file: {e}", context={"path": str(config_path)}
        ) from e

    if config_dict is None:
        config_dict = {}
    if not isinstance(config_dict, dict):
        raise ConfigError(
            "Config file must contain a mapping", context={"path": str(config_path)}
        )

    _resolve_relative_paths(config_dict, abs_path.parent)

    extends = config_dict.pop("extends", None)
    if extends:
        parent_path = _resolve_extends_path(extends, abs_path.parent)
        parent_dict = _load_recursive(parent_path, visited.copy())
        config_dict = merge_configs(parent_dict, config_dict)

    return config_dict


def _resolve_relative_paths(config_dict: Dict[str, Any], base_dir: Path) -> None:
    def _resolve(value: str) -> str:
        if "://" in value or os.path.isabs(value):
            return value
        return str((base_dir / value).resolve())

    for dotted in _PATH_KEYS:
        section, key = dotted.split(".")
        block = config_dict.get(section)
        if isinstance(block, dict) and isinstance(block.get(key), str):
            block[key] = _resolve(block[key])

    data = config_dict.get("data")
    if isinstance(data, dict) and isinstance(data.get("eval"), dict):
        data["eval"] = {
            tag: _resolve(p) if isinstance(p, str) else p for tag, p in data["eval"].items()
        }


def _resolve_extends_path(extends: str, current_dir: Path) -> Path:
    """
    Resolve an extends path relative to the current config directory.

    Raises:
        ConfigError: If the parent config does not exist
    """
    path = Path(extends) if os.path.isabs(extends) else (current_dir / extends).resolve()
    if not path.exists():
        raise ConfigError(
            f"Parent config not found: {extends}",
            context={"current_dir": str(current_dir), "extends": extends},
        )
    return path
