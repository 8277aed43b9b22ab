"""Simulated clock."""

__all__ = ["TICK", "SimClock"]

TICK = 0.05  # 20 Hz


class SimClock:
    """Monotone clock counting integer ticks.

    Time is stored as a tick count so that repeated advances never drift,
    every duration is rounded to the nearest tick.
    """

    def __init__(self, tick: float = TICK) -> None:
        if not tick > 0:
            raise ValueError(f"tick must be positive, got {tick}")
        self.tick = tick
        self.ticks = 0

    def __repr__(self) -> str:
        return f"SimClock(now={self.now:.2f}s, tick={self.tick:g}s)"

    @property
    def now(self) -> float:
        return self.ticks * self.tick

    def quantize(self, seconds: float) -> int:
        """Number of ticks closest to a duration."""
        if seconds < 0:
            raise ValueError(f"duration must be non-negative, got {seconds}")
        return int(round(seconds / self.tick))

    def advance(self, seconds: float) -> float:
        """Advance by a duration, return the quantized elapsed time."""
        n = self.quantize(seconds)
        self.ticks += n
        return n * self.tick
