"""Timing helpers."""

import time
from typing import Optional

__all__ = ["Stopwatch"]


class Stopwatch:
    """Wall clock of a block, with an optional deadline.

    Examples
    --------
    >>> with Stopwatch(budget=30) as sw:
    ...     while not sw.expired():
    ...         ...
    >>> sw.elapsed
    """

    def __init__(self, budget: Optional[float] = None) -> None:
        self.budget = budget
        self.start: float = 0.0
        self.stop: Optional[float] = None

    def __enter__(self) -> "Stopwatch":
        self.start, self.stop = time.perf_counter(), None
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        self.stop = time.perf_counter()

    @property
    def elapsed(self) -> float:
        end = self.stop if self.stop is not None else time.perf_counter()
        return end - self.start

    @property
    def deadline(self) -> Optional[float]:
        """Deadline on the `time.perf_counter` clock."""
        return None if self.budget is None else self.start + self.budget

    def expired(self) -> bool:
        return self.budget is not None and self.elapsed > self.budget
