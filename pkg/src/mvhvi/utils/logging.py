"""Package logger for mvhvi: console on stderr, optional log file."""

import logging
from pathlib import Path
from typing import Optional

from mvhvi.utils.paths import ensure_parent_exists

PACKAGE_LOGGER = "mvhvi"
LOG_FORMAT = "[%(asctime)s] %(levelname)s %(name)s: %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def _level(name: str) -> int:
    value = logging.getLevelName(name.upper())
    if not isinstance(value, int):
        raise ValueError(f"unknown log level {name!r}")
    return value


def _formatter() -> logging.Formatter:
    return logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)


def setup_logging(log_file: Optional[Path] = None, level: str = "INFO") -> logging.Logger:
    """
    Configure the package logger for one CLI invocation.

    Replaces any handlers from an earlier call, so repeated in-process runs
    (the test suite calls the CLI many times) do not duplicate lines.

    Args:
        log_file: Also append to this file when given; its directory is created.
        level: DEBUG, INFO, WARNING or ERROR.

    Returns:
        The "mvhvi" logger.
    """
    logger = logging.getLogger(PACKAGE_LOGGER)
    logger.setLevel(_level(level))
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    console = logging.StreamHandler()
    console.setFormatter(_formatter())
    logger.addHandler(console)

    if log_file:
        file_handler = logging.FileHandler(ensure_parent_exists(log_file), encoding="utf-8")
        file_handler.setFormatter(_formatter())
        logger.addHandler(file_handler)

    return logger


def get_logger(name: str = PACKAGE_LOGGER) -> logging.Logger:
    """
    Module logger under the "mvhvi" tree.

    Library use without setup_logging() still gets a WARNING-level console
    handler on the package logger, so hypothesis demotions and failed
    restarts are visible.
    """
    package = logging.getLogger(PACKAGE_LOGGER)
    if not package.handlers:
        package.setLevel(logging.WARNING)
        handler = logging.StreamHandler()
        handler.setFormatter(_formatter())
        package.addHandler(handler)
    return logging.getLogger(name)
