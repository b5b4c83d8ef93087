"""Command-line interface for mvhvi."""

from mvhvi.cli.main import main, run

__all__ = ["main", "run"]
