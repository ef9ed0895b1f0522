from __future__ import annotations

from typing import Optional

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_GUARD = 3


class PalpermError(ValueError):
    """Base class for every domain error raised by the package."""

    exit_code = EXIT_USAGE


class InvalidDegreeError(PalpermError):
    """Degree outside the supported range."""


class NotABijectionError(PalpermError):
    """One-line images do not form a rearrangement of 1..n."""

    def __init__(self, message: str, position: Optional[int] = None) -> None:
        super().__init__(message)
        self.position = position


class InvalidCycleError(PalpermError):
    """Cycle entry out of range or repeated."""


class DegreeMismatchError(PalpermError):
    """Operands of a group operation have different degrees."""


class RankOutOfRangeError(PalpermError):
    """Rank or rank window outside [0, n!]."""


class GuardError(PalpermError):
    """A size guard of an exhaustive operation was exceeded."""

    exit_code = EXIT_GUARD


class TilingError(PalpermError):
    """Partial census windows overlap, leave gaps, or disagree on n/mode."""


class ParseError(PalpermError):
    """Permutation or range text cannot be parsed."""

    def __init__(self, message: str, position: Optional[int] = None) -> None:
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position
