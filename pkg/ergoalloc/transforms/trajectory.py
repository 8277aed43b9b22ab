"""Transformations of trajectories."""

import numpy as np

from ergoalloc.kwear.trajectory import Trajectory
from ergoalloc.transforms.base import Transform

__all__ = ["ZeroStart", "Resample", "Crop"]


class ZeroStart(Transform[Trajectory, Trajectory]):
    """Shift timestamps so that the first sample is at zero."""

    def __call__(self, x: Trajectory) -> Trajectory:
        if len(x) == 0 or x.t[0] == 0:
            return x

        return Trajectory(x.t - x.t[0], x.scores, x.postures, source=x.source)


class Resample(Transform[Trajectory, Trajectory]):
    """Hold-last resampling on a regular grid.

    The grid starts at the first sample and spans the duration rounded
    to the nearest period. Each grid point takes the sample at or right
    before it, so data already on the grid is unchanged.
    """

    def __init__(self, period: float) -> None:
        if not period > 0:
            raise ValueError(f"period must be positive, got {period}")
        self.period = period

    def __call__(self, x: Trajectory) -> Trajectory:
        if len(x) < 2:
            return x

        n = int(round(x.duration() / self.period))
        t = x.t[0] + self.period * np.arange(n + 1)
        # tolerate float error of grid points sitting on a sample
        eps = 1e-9 * self.period
        idx = np.searchsorted(x.t, t + eps, side="right") - 1
        idx = np.clip(idx, 0, len(x) - 1)
        postures = None if x.postures is None else x.postures[idx]
        return Trajectory(t, x.scores[idx], postures, source=x.source)

    def __repr__(self) -> str:
        return f"Resample-{self.period:g}"


class Crop(Transform[Trajectory, Trajectory]):
    """Keep samples within `duration` seconds of the first one."""

    def __init__(self, duration: float) -> None:
        if duration < 0:
            raise ValueError(f"duration must be non-negative, got {duration}")
        self.duration = duration

    def __call__(self, x: Trajectory) -> Trajectory:
        if len(x) == 0:
            return x

        keep = x.t <= x.t[0] + self.duration + 1e-9
        postures = None if x.postures is None else x.postures[keep]
        return Trajectory(x.t[keep], x.scores[keep], postures, source=x.source)

    def __repr__(self) -> str:
        return f"Crop-{self.duration:g}"
