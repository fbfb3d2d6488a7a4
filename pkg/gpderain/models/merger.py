"""Deep merge for config inheritance and flag overrides."""

from typing import Any, Dict


def merge_configs(parent: Dict[str, Any], child: Dict[str, Any]) -> Dict[str, Any]:
    """
    Deep merge a parent config into a child config.

    Rules:
    - Scalars: child overrides parent
    - Dicts: deep merge (recursive)
    - Lists: child overrides
    - Missing keys: inherit from parent

    Args:
        parent: Parent config dictionary
        child: Child config dictionary

    Returns:
        Merged config dictionary
    """
    result = parent.copy()

    for key, child_value in child.items():
        if isinstance(child_value, dict) and isinstance(result.get(key), dict):
            result[key] = merge_configs(result[key], child_value)
        else:
            result[key] = child_value

    return result


def overrides_from_flags(**flags: Any) -> Dict[str, Any]:
    """Turn dotted flag names into a nested override dict, skipping unset flags.

    `overrides_from_flags(**{"train.seed": 3, "train.kernel": None})`
    returns `{"train": {"seed": 3}}`.
    """
    nested: Dict[str, Any] = {}
    for dotted, value in flags.items():
        if value is None:
            continue
        current = nested
        *parents, leaf = dotted.split(".")
        for part in parents:
            current = current.setdefault(part, {})
        current[leaf] = value
    return nested
