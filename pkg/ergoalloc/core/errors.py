"""Error kinds raised across the library.

Notes
-----
All of them subclass a built-in exception, so callers that only care
about `ValueError` or `KeyError` keep working.
"""

from typing import Any

__all__ = [
    "InvalidAssemblyError",
    "ScenarioError",
    "InfeasibleAssemblyError",
    "ArcLookupError",
    "NoFeasiblePlanError",
    "SearchTooLargeError",
    "SearchTimeoutError",
    "TrajectoryError",
    "CalibrationMissingError",
    "InsufficientExecutionsError",
    "CollaborationAborted",
]


class InvalidAssemblyError(ValueError):
    """Assembly description violates the partition rules."""


class ScenarioError(ValueError):
    """Scenario file cannot be parsed or validated."""

    def __init__(self, message: str, *, field: str | None = None) -> None:
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class InfeasibleAssemblyError(ValueError):
    """No plan joins every piece any more."""


class ArcLookupError(KeyError):
    """No matching (and not pruned) hyper-arc."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class NoFeasiblePlanError(RuntimeError):
    """Open set exhausted before reaching the goal configuration."""


class SearchTooLargeError(RuntimeError):
    """Brute-force enumeration refused."""


class SearchTimeoutError(TimeoutError):
    """Search exceeded its time budget."""


class TrajectoryError(ValueError):
    """Trajectory data is empty, unordered or missing."""


class CalibrationMissingError(KeyError):
    """No prediction parameter for an (action, joint) pair."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class InsufficientExecutionsError(ValueError):
    """Fewer recorded executions than calibration needs."""


class CollaborationAborted(RuntimeError):
    """A repetition could not be completed, carries the partial trace."""

    def __init__(self, message: str, trace: Any = None) -> None:
        super().__init__(message)
        self.trace = trace
