"""Kinematic Wear, an RC-circuit model of ergonomic risk.

Notes
-----
Each monitored joint carries a wear level `V` in [0, 1). While the human
works in a posture of RULA score `g`, the level charges towards 1 with
time constant `C / g`; while resting it discharges towards 0 with time
constant `C / r`. Both branches are integrated exactly per interval of
constant score, so splitting an interval never changes the result.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Literal, Optional

import numpy as np
import numpy.typing as npt
import pandas as pd
from typing_extensions import Self

from ergoalloc.core.errors import TrajectoryError
from ergoalloc.kwear.rula import JOINTS, Joint
from ergoalloc.kwear.trajectory import Trajectory

__all__ = [
    "KWearParams",
    "KWearState",
    "KWearLog",
    "charge_step",
    "recovery_step",
    "integrate_trajectory",
    "predict",
]

# largest float below 1, wear never reaches the asymptote
V_SUP = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class KWearParams:
    """Model constants.

    Attributes
    ----------
    t_max : float, default `240`
        Seconds of average-risk work after which wear reaches `v_max`,
        that is five time constants.
    v_max : float, default `0.993`
    g_avg : float, default `3`
        Average RULA score of the task.
    """

    t_max: float = 240.0
    v_max: float = 0.993
    g_avg: float = 3.0

    def __post_init__(self) -> None:
        if not self.t_max > 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if not 0.5 < self.v_max < 1:
            raise ValueError(f"v_max must be in (0.5, 1), got {self.v_max}")
        if not self.g_avg > 0:
            raise ValueError(f"g_avg must be positive, got {self.g_avg}")

    @cached_property
    def capacity(self) -> float:
        """Capacity C, in score·seconds."""
        return -self.g_avg * self.t_max / math.log(1 - self.v_max)

    @cached_property
    def recovery_rate(self) -> float:
        """Recovery rate r, full recovery from `v_max` takes `t_max`."""
        return -(self.capacity / self.t_max) * math.log((1 - self.v_max) / self.v_max)


def charge_step(
    v: npt.ArrayLike, g: npt.ArrayLike, dt: float, params: KWearParams
) -> npt.NDArray[np.float64]:
    """Charge wear under a constant score for `dt` seconds.

    Works element-wise, so a whole joint vector can be stepped at once.
    """
    v = _check_level(v)
    if dt < 0:
        raise ValueError(f"dt must be non-negative, got {dt}")

    g = np.asarray(g, dtype=np.float64)
    out = 1 - (1 - v) * np.exp(-g * dt / params.capacity)
    return np.minimum(out, V_SUP)


def recovery_step(
    v: npt.ArrayLike, dt: float, params: KWearParams
) -> npt.NDArray[np.float64]:
    """Discharge wear while resting for `dt` seconds."""
    v = _check_level(v)
    if dt < 0:
        raise ValueError(f"dt must be non-negative, got {dt}")

    return v * math.exp(-params.recovery_rate * dt / params.capacity)


def predict(v: npt.ArrayLike, alpha: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Predicted wear after one action, `1 - alpha·(1 - v)`."""
    v = _check_level(v)
    alpha = np.asarray(alpha, dtype=np.float64)
    if np.any(alpha <= 0) or np.any(alpha > 1) or not np.all(np.isfinite(alpha)):
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")

    return np.minimum(1 - alpha * (1 - v), V_SUP)


@dataclass(frozen=True, eq=False)
class KWearState:
    """Wear of every monitored joint at time `t`.

    Attributes
    ----------
    v : array of shape (m,)
        Wear levels in `JOINTS` order, read-only.
    t : float
        Simulation time in seconds.
    """

    v: npt.NDArray[np.float64]
    t: float = 0.0

    def __post_init__(self) -> None:
        v = _check_level(self.v).copy()
        if v.ndim != 1:
            raise ValueError(f"wear levels must be a vector, got shape {v.shape}")
        v.flags.writeable = False
        object.__setattr__(self, "v", v)

    @classmethod
    def zeros(cls, n_joints: int = len(JOINTS), t: float = 0.0) -> Self:
        return cls(np.zeros(n_joints, dtype=np.float64), t)

    def __getitem__(self, joint: Joint | int) -> float:
        idx = JOINTS.index(joint) if isinstance(joint, str) else joint  # type: ignore
        return float(self.v[idx])

    def replace(self, v: npt.ArrayLike, t: float) -> Self:
        return type(self)(np.asarray(v, dtype=np.float64), t)

    def as_dict(self) -> Dict[str, float]:
        return {j: float(x) for j, x in zip(JOINTS, self.v)}


@dataclass
class KWearLog:
    """Per-tick wear series of every joint, appended by the integrator."""

    t: List[npt.NDArray[np.float64]] = field(default_factory=list)
    v: List[npt.NDArray[np.float64]] = field(default_factory=list)

    def append(self, t: npt.ArrayLike, v: npt.ArrayLike) -> None:
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        v = np.atleast_2d(np.asarray(v, dtype=np.float64))
        assert v.shape[0] == t.shape[0]
        self.t.append(t)
        self.v.append(v)

    def __len__(self) -> int:
        return sum(len(t) for t in self.t)

    def to_data_frame(self) -> pd.DataFrame:
        if len(self.t) == 0:
            return pd.DataFrame(columns=["t_seconds", *JOINTS])

        df = pd.DataFrame(np.concatenate(self.v), columns=list(JOINTS))
        df.insert(0, "t_seconds", np.concatenate(self.t))
        return df


def integrate_trajectory(
    state: KWearState,
    trajectory: Trajectory,
    mode: Literal["charge", "recovery"],
    params: KWearParams,
    *,
    log: Optional[KWearLog] = None,
) -> KWearState:
    """Advance wear along a sampled trajectory.

    The score of each sample interval is the one of its left endpoint.
    Recovery ignores scores and only uses timestamps.

    Parameters
    ----------
    state : KWearState
    trajectory : Trajectory
    mode : `charge` | `recovery`
    params : KWearParams
    log : KWearLog, optional
        Receives the wear at every sample, on the state's time axis.
    """
    t = trajectory.t
    if len(t) < 2:
        return state

    dt = np.diff(t)
    if np.any(dt < 0):
        raise TrajectoryError(f"unordered timestamps in `{trajectory.source}`")

    match mode:
        case "charge":
            g = trajectory.scores[:-1].astype(np.float64)
            exponent = np.cumsum(g * dt[:, None], axis=0) / params.capacity
            series = 1 - (1 - state.v) * np.exp(-exponent)
        case "recovery":
            elapsed = np.cumsum(dt)
            rate = params.recovery_rate / params.capacity
            series = state.v * np.exp(-rate * elapsed)[:, None]
        case _:
            raise ValueError(f"unknown integration mode `{mode}`")

    series = np.minimum(series, V_SUP)
    if log is not None:
        log.append(state.t + (t[1:] - t[0]), series)

    return state.replace(series[-1], state.t + float(t[-1] - t[0]))


def _check_level(v: npt.ArrayLike) -> npt.NDArray[np.float64]:
    v = np.asarray(v, dtype=np.float64)
    if np.any(v < 0) or np.any(v >= 1) or not np.all(np.isfinite(v)):
        raise ValueError(f"wear level must be in [0, 1), got {v}")
    return v
