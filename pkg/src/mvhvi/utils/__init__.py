"""Utility functions and classes."""

from mvhvi.utils.logging import get_logger, setup_logging
from mvhvi.utils.paths import ensure_parent_exists, expand_path

__all__ = ["ensure_parent_exists", "expand_path", "get_logger", "setup_logging"]
