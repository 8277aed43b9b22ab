"""Execution of actions by the simulated workers."""

import logging
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from typing_extensions import Self

from ergoalloc.core.assembly import Worker
from ergoalloc.core.scenario import ActionExecutionSpec, Scenario
from ergoalloc.kwear.model import (
    KWearLog,
    KWearParams,
    KWearState,
    integrate_trajectory,
)
from ergoalloc.kwear.rula import JOINTS
from ergoalloc.kwear.trajectory import Trajectory
from ergoalloc.sim.clock import SimClock
from ergoalloc.sim.recorder import TrajectorySource

__all__ = [
    "TaktConfig",
    "execute_human_action",
    "execute_robot_action",
    "rest",
    "takt_pause",
]


@dataclass(frozen=True)
class TaktConfig:
    """Pacing of repetitions, one every `t_takt` seconds if set."""

    t_takt: Optional[float] = None

    def __post_init__(self) -> None:
        if self.t_takt is not None and not self.t_takt > 0:
            raise ValueError(f"takt time must be positive, got {self.t_takt}")

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> Self:
        cfg = cls(scenario.t_takt)
        cfg.check(scenario)
        return cfg

    def check(self, scenario: Scenario) -> None:
        """Warn if one worker alone cannot complete a repetition in time."""
        if self.t_takt is None:
            return

        for w in scenario.workers:
            total = 0.0
            for spec in scenario.actions:
                if w.is_human():
                    d = spec.human_duration() or (
                        spec.template.duration if spec.template is not None else 0.0
                    )
                else:
                    d = spec.duration(w) or 0.0
                total += d

            if total > self.t_takt:
                warnings.warn(
                    f"takt time {self.t_takt}s is shorter than a repetition "
                    f"by `{w.name}` alone ({total:.2f}s)"
                )


def execute_human_action(
    clock: SimClock,
    state: KWearState,
    spec: ActionExecutionSpec,
    params: KWearParams,
    *,
    trajectories: TrajectorySource,
    variant: int = 0,
    log: Optional[KWearLog] = None,
) -> Tuple[KWearState, float]:
    """Charge wear along one execution of the action.

    Returns
    -------
    state : KWearState
    elapsed : float
        Duration of the execution, in seconds.

    Raises
    ------
    TrajectoryError
        The trajectory file is missing or malformed.
    """
    trajectory = trajectories.get(spec, variant)
    return _play(clock, state, trajectory, params, log=log)


def _play(
    clock: SimClock,
    state: KWearState,
    trajectory: Trajectory,
    params: KWearParams,
    *,
    log: Optional[KWearLog] = None,
) -> Tuple[KWearState, float]:
    state = state.replace(state.v, clock.now)
    state = integrate_trajectory(state, trajectory, "charge", params, log=log)
    elapsed = clock.advance(trajectory.duration())
    return state.replace(state.v, clock.now), elapsed


def execute_robot_action(
    clock: SimClock,
    state: KWearState,
    spec: ActionExecutionSpec,
    worker: Worker,
    params: KWearParams,
    *,
    log: Optional[KWearLog] = None,
) -> Tuple[KWearState, float]:
    """The human rests while the robot executes the action."""
    duration = spec.duration(worker)
    if duration is None:
        raise ValueError(f"no duration of `{spec.label}` for `{worker.name}`")
    return rest(clock, state, duration, params, log=log)


def rest(
    clock: SimClock,
    state: KWearState,
    seconds: float,
    params: KWearParams,
    *,
    log: Optional[KWearLog] = None,
) -> Tuple[KWearState, float]:
    """Recover wear for a duration quantized to the clock tick."""
    n = clock.quantize(seconds)
    if n == 0:
        return state.replace(state.v, clock.now), 0.0

    t = clock.tick * np.arange(n + 1)
    idle = Trajectory(t, np.ones((n + 1, len(JOINTS)), dtype=np.int32), source="rest")
    state = state.replace(state.v, clock.now)
    state = integrate_trajectory(state, idle, "recovery", params, log=log)
    elapsed = clock.advance(seconds)
    return state.replace(state.v, clock.now), elapsed


def takt_pause(
    clock: SimClock,
    state: KWearState,
    repetition_elapsed: float,
    cfg: TaktConfig,
    params: KWearParams,
    *,
    log: Optional[KWearLog] = None,
) -> Tuple[KWearState, float, bool]:
    """Rest until the next repetition is due.

    Returns
    -------
    state : KWearState
    pause : float
        Seconds of recovery applied.
    violated : bool
        Whether the repetition overran the takt time.
    """
    if cfg.t_takt is None:
        return state, 0.0, False

    if repetition_elapsed >= cfg.t_takt:
        logging.info(
            "takt violation: repetition took %.2fs, takt is %.2fs",
            repetition_elapsed,
            cfg.t_takt,
        )
        return state, 0.0, True

    state, pause = rest(clock, state, cfg.t_takt - repetition_elapsed, params, log=log)
    return state, pause, False
