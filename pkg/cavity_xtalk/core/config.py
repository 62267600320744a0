"""Load the simulator configuration from one or more YAML files.

The bundled ``cavity_xtalk/config.yaml`` holds a default for every tunable
constant.  A ``config.d/`` directory next to the chosen file may hold
``*.yaml`` fragments which are merged on top in sorted order, and string
values may reference environment variables as ``${VAR}``.
"""

from __future__ import annotations

import os
import re
from pathlib import Path
from typing import Any, Dict

import yaml

_ENV_PATTERN = re.compile(r"\$\{([^}]+)\}")

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[1] / "config.yaml"


def _expand_env_vars(obj: Any) -> Any:
    """Recursively substitute ``${VAR}`` references in strings."""
    if isinstance(obj, dict):
        return {k: _expand_env_vars(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_expand_env_vars(v) for v in obj]
    if isinstance(obj, str):
        return _ENV_PATTERN.sub(lambda match: os.getenv(match.group(1), ""), obj)
    return obj


def _deep_merge(base: Dict[str, Any], extra: Dict[str, Any]) -> Dict[str, Any]:
    for key, value in extra.items():
        if key in base and isinstance(base[key], dict) and isinstance(value, dict):
            base[key] = _deep_merge(dict(base[key]), value)
        else:
            base[key] = value
    return base


def _load_yaml(path: Path) -> Dict[str, Any]:
    with path.open("r", encoding="utf-8") as fh:
        return _expand_env_vars(yaml.safe_load(fh) or {})


def load_config(
    path: str | Path | None = None,
    *,
    fragments_dir: str | Path | None = None,
) -> Dict[str, Any]:
    """Load the base configuration and any fragments.

    Args:
        path: YAML file to load.  Defaults to the bundled ``config.yaml``.
        fragments_dir: Directory of ``*.yaml`` overrides.  Defaults to a
            ``config.d`` directory next to ``path``.

    Raises:
        FileNotFoundError: If ``path`` does not exist.
    """
    cfg_path = Path(path) if path is not None else DEFAULT_CONFIG_PATH
    if not cfg_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {cfg_path}")

    config = _load_yaml(cfg_path)

    fragments_root = (
        Path(fragments_dir) if fragments_dir is not None else cfg_path.with_name("config.d")
    )
    if fragments_root.is_dir():
        for fragment in sorted(fragments_root.glob("*.yaml")):
            config = _deep_merge(config, _load_yaml(fragment))

    return config


def section(config: Dict[str, Any], name: str) -> Dict[str, Any]:
    """Return ``config[name]`` or an empty dict when the section is absent."""
    value = config.get(name) or {}
    if not isinstance(value, dict):
        raise ValueError(f"config section {name!r} must be a mapping, got {type(value).__name__}")
    return value


__all__ = ["DEFAULT_CONFIG_PATH", "load_config", "section"]
