"""Exception types shared across the package."""

from __future__ import annotations


class CrossDiffError(Exception):
    """Base class for all package errors."""


class GridMismatchError(CrossDiffError):
    """Fields that must share a grid do not."""


class ConfigError(CrossDiffError):
    """Invalid configuration; ``path`` is the dotted location of the offense."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class SolverError(CrossDiffError):
    """Time integration failed; ``time`` is the instant of failure."""

    def __init__(self, message: str, time: float = float("nan")):
        self.time = time
        super().__init__(message)


class NegativeDensityError(SolverError):
    """A density dropped below the negativity tolerance (blow-up or dt too large)."""

    def __init__(self, time: float, field: str, index: int, value: float):
        self.field = field
        self.index = index
        self.value = value
        super().__init__(
            f"negative density in {field} at t={time!r}, flat cell index {index}, "
            f"value {value!r}",
            time=time,
        )


class NonFiniteError(SolverError):
    """NaN or Inf appeared in a solution field."""

    def __init__(self, time: float, field: str, index: int):
        self.field = field
        self.index = index
        super().__init__(
            f"non-finite value in {field} at t={time!r}, flat cell index {index}",
            time=time,
        )


class SolverDivergedError(SolverError):
    """An iterative linear solve exceeded its iteration cap."""


class NonpositiveSteadyStateError(CrossDiffError):
    """Relative entropy needs strictly positive steady-state densities."""


class ZeroMeanError(CrossDiffError):
    """The stability threshold needs strictly positive mean densities."""


class WindowTooShortError(CrossDiffError):
    """Growth-rate fit window contains fewer than the minimum number of samples."""


class SignalBelowNoiseError(CrossDiffError):
    """Mode projection is at roundoff level; no growth rate can be fit."""
