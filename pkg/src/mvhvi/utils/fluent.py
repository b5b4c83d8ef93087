"""Single-use fluent builders."""

from typing import Generic, TypeVar

T = TypeVar("T")


class FluentBuilder(Generic[T]):
    """
    Chained setters that return self, finished by one terminal call.

    Subclasses call _check_not_built() in every setter and _mark_built()
    in the terminal method (Config.build() for the configuration file).
    """

    def __init__(self) -> None:
        self._built = False

    def _check_not_built(self) -> None:
        if self._built:
            raise RuntimeError(f"{type(self).__name__} is finished; create a new one")

    def _mark_built(self) -> None:
        self._built = True
