"""Recorded executions of the actions of a scenario."""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from ergoalloc.core.errors import TrajectoryError
from ergoalloc.core.scenario import ActionExecutionSpec, Scenario
from ergoalloc.kwear.calibration import CalibrationProfile, CalibrationResult, calibrate
from ergoalloc.kwear.trajectory import LazyTrajectories, Trajectory
from ergoalloc.sim.clock import TICK
from ergoalloc.sim.synthesis import synthesize_trajectory
from ergoalloc.transforms import Crop, Resample, Transform, Transforms, ZeroStart

__all__ = ["TrajectorySource", "calibrate_scenario"]


class TrajectorySource:
    """Human executions of every action, loaded or synthesized on demand.

    Every execution is shifted to start at zero and resampled on the
    clock grid, then cropped to the nominal human duration if the
    scenario gives one.
    """

    def __init__(self, scenario: Scenario, *, tick: float = TICK) -> None:
        self.scenario = scenario
        self.tick = tick
        self.files: Dict[int, LazyTrajectories] = {}
        self.cache: Dict[Tuple[int, int], Trajectory] = {}

    def __len__(self) -> int:
        return len(self.scenario.actions)

    def count(self, spec: ActionExecutionSpec) -> int:
        return spec.n_executions()

    def get(self, spec: ActionExecutionSpec, variant: int) -> Trajectory:
        """The `variant`-th execution, cycling through the recorded ones."""
        n = spec.n_executions()
        if n == 0:
            raise TrajectoryError(f"no execution recorded for action `{spec.label}`")

        key = (spec.action, variant % n)
        if key not in self.cache:
            trans = self.transform(spec)
            self.cache[key] = trans(self._load(spec, variant % n))
            logging.debug(
                "execution %d of `%s` prepared by %s", key[1], spec.label, trans
            )
        return self.cache[key]

    def executions(self, spec: ActionExecutionSpec) -> List[Trajectory]:
        return [self.get(spec, i) for i in range(spec.n_executions())]

    def transform(self, spec: ActionExecutionSpec) -> Transform[Trajectory, Trajectory]:
        steps: List[Transform] = [ZeroStart(), Resample(self.tick)]
        if (duration := spec.human_duration()) is not None:
            steps.append(Crop(duration))
        return Transforms(*steps)

    def _load(self, spec: ActionExecutionSpec, variant: int) -> Trajectory:
        if len(spec.trajectories) > 0:
            if spec.action not in self.files:
                self.files[spec.action] = LazyTrajectories(
                    spec.trajectories, tables=self.scenario.rula_tables
                )
            return self.files[spec.action][variant]

        assert spec.template is not None
        return synthesize_trajectory(
            spec.template,
            seed=self.scenario.seed,
            stream=spec.action,
            variant=variant,
            tables=self.scenario.rula_tables,
            tick=self.tick,
        )


def calibrate_scenario(
    scenario: Scenario,
    eta0: int = 3,
    eta_max: int = 10,
    err_target: float = 1e-3,
    *,
    actions: Optional[Sequence[str]] = None,
    source: Optional[TrajectorySource] = None,
) -> Tuple[CalibrationProfile, List[CalibrationResult]]:
    """Calibrate every action the human may be assigned.

    Returns
    -------
    profile : CalibrationProfile
        Includes the actions that did not converge, with their best
        estimate.
    results : list of CalibrationResult
    """
    source = source or TrajectorySource(scenario)
    actions = scenario.human_actions() if actions is None else actions

    profile, results = CalibrationProfile(), []
    for label in actions:
        spec = scenario.action_spec(label)
        res = calibrate(
            label, source.executions(spec), eta0, eta_max, err_target, scenario.kwear
        )
        logging.info(
            "calibrated `%s`: eta=%d, max error=%.3g%s",
            label,
            res.eta,
            res.max_error,
            "" if res.converged else " (not converged)",
        )
        res.apply(profile)
        results.append(res)

    return profile, results
