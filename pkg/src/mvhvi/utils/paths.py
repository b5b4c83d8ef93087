"""Filesystem locations: the config directory and report outputs."""

import os
from pathlib import Path
from typing import Union

CONFIG_DIR_ENV = "MVHVI_CONFIG_DIR"


def expand_path(path: Union[str, Path]) -> Path:
    """Absolute path with ~ and $VARS expanded."""
    return Path(os.path.expandvars(str(path))).expanduser().resolve()


def ensure_dir(path: Union[str, Path]) -> Path:
    """Create a report directory (and parents) if missing."""
    target = expand_path(path)
    target.mkdir(parents=True, exist_ok=True)
    return target


def ensure_parent_exists(path: Union[str, Path]) -> Path:
    """Resolve a file path and create its directory."""
    target = expand_path(path)
    ensure_dir(target.parent)
    return target


def get_config_dir() -> Path:
    """~/.mvhvi, or $MVHVI_CONFIG_DIR when set. Never created on lookup."""
    override = os.environ.get(CONFIG_DIR_ENV)
    return expand_path(override) if override else Path("~/.mvhvi").expanduser()


def get_config_file() -> Path:
    return get_config_dir() / "config.json"
