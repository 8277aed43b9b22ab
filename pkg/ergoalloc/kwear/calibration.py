"""Calibration of the wear prediction parameters.

Notes
-----
For an action `k` and a joint `i`, the wear after one execution started
from `v` is `1 - alpha·(1 - v)` with `alpha = exp(-∫G/C)`. Alpha is
estimated offline by averaging over recorded executions, growing their
number until the predicted terminal wear matches every recorded one.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
from typing_extensions import Self

from ergoalloc.core.errors import (
    CalibrationMissingError,
    InsufficientExecutionsError,
    TrajectoryError,
)
from ergoalloc.kwear.model import KWearParams, KWearState, integrate_trajectory, predict
from ergoalloc.kwear.rula import JOINTS, Joint, joint_index
from ergoalloc.kwear.trajectory import Trajectory
from ergoalloc.utils import read_json, write_json

__all__ = [
    "PROFILE_SCHEMA",
    "CalibrationProfile",
    "CalibrationResult",
    "Recorder",
    "execution_alphas",
    "compute_alpha",
    "calibrate",
]

PROFILE_SCHEMA = 1

Recorder = Sequence[Trajectory] | Callable[[int], Trajectory]


def execution_alphas(
    executions: Sequence[Trajectory], params: KWearParams
) -> npt.NDArray[np.float64]:
    """Alpha of every execution and joint, shape (η, m)."""
    out = []
    for i, ex in enumerate(executions):
        if len(ex) == 0:
            raise TrajectoryError(f"execution #{i} is empty")
        out.append(np.exp(-ex.score_integral() / params.capacity))
    return np.stack(out) if out else np.zeros((0, len(JOINTS)))


def compute_alpha(
    executions: Sequence[Trajectory], joint: Joint, params: KWearParams
) -> float:
    """Mean alpha of one joint over executions of an action."""
    if len(executions) == 0:
        raise TrajectoryError("no execution to compute alpha from")

    alphas = execution_alphas(executions, params)
    return float(np.mean(alphas[:, joint_index(joint)]))


@dataclass
class CalibrationProfile:
    """Alpha of every calibrated (action, joint), keyed by action label.

    Beta is always derived as `1 - alpha`, never stored.
    """

    alpha: Dict[str, npt.NDArray[np.float64]] = field(default_factory=dict)
    executions_used: Dict[str, int] = field(default_factory=dict)
    max_error: Dict[str, float] = field(default_factory=dict)
    converged: Dict[str, bool] = field(default_factory=dict)

    def __contains__(self, action: object) -> bool:
        return action in self.alpha

    def __len__(self) -> int:
        return len(self.alpha)

    def set_entry(
        self,
        action: str,
        alpha: npt.ArrayLike,
        *,
        eta: int = 0,
        max_error: float = 0.0,
        converged: bool = True,
    ) -> None:
        alpha = np.asarray(alpha, dtype=np.float64)
        if alpha.shape != (len(JOINTS),):
            raise ValueError(
                f"expected alpha of {len(JOINTS)} joints, got {alpha.shape}"
            )
        if np.any(alpha <= 0) or np.any(alpha > 1):
            raise ValueError(f"alpha must be in (0, 1], got {alpha}")

        self.alpha[action] = alpha
        self.executions_used[action] = eta
        self.max_error[action] = float(max_error)
        self.converged[action] = converged

    def alphas(self, action: str) -> npt.NDArray[np.float64]:
        try:
            return self.alpha[action]
        except KeyError as e:
            raise CalibrationMissingError(
                f"no calibration for action `{action}`"
            ) from e

    def alpha_of(self, action: str, joint: Joint) -> float:
        return float(self.alphas(action)[joint_index(joint)])

    def beta_of(self, action: str, joint: Joint) -> float:
        return 1 - self.alpha_of(action, joint)

    def missing(self, actions: Sequence[str]) -> List[str]:
        return [a for a in actions if a not in self.alpha]

    @classmethod
    def uniform(cls, actions: Sequence[str], alpha: float = 1.0) -> Self:
        """Same alpha for every action and joint, e.g. 1 for no wear."""
        profile = cls()
        for a in actions:
            profile.set_entry(a, np.full(len(JOINTS), alpha))
        return profile

    def to_dict(self) -> Dict:
        return {
            "schema": PROFILE_SCHEMA,
            "joints": list(JOINTS),
            "actions": {
                a: {
                    "alpha": dict(zip(JOINTS, self.alpha[a].tolist())),
                    "eta": self.executions_used.get(a, 0),
                    "max_error": self.max_error.get(a, 0.0),
                    "converged": self.converged.get(a, True),
                }
                for a in sorted(self.alpha)
            },
        }

    @classmethod
    def from_dict(cls, d: Dict) -> Self:
        if d.get("schema") != PROFILE_SCHEMA:
            raise ValueError(f"unsupported profile schema `{d.get('schema')}`")

        profile = cls()
        for action, entry in d["actions"].items():
            alpha = [entry["alpha"][j] for j in JOINTS]
            profile.set_entry(
                action,
                alpha,
                eta=int(entry.get("eta", 0)),
                max_error=float(entry.get("max_error", 0.0)),
                converged=bool(entry.get("converged", True)),
            )
        return profile

    def to_json(self, fname: str) -> None:
        write_json(self.to_dict(), fname)

    @classmethod
    def from_json(
        cls, fname: str, *, encoding: Literal["detect"] | str = "utf-8"
    ) -> Self:
        try:
            return cls.from_dict(read_json(fname, encoding=encoding))
        except (KeyError, TypeError, json.JSONDecodeError) as e:
            raise ValueError(f"fails to read calibration profile: {fname}") from e


@dataclass(frozen=True, eq=False)
class CalibrationResult:
    """Outcome of calibrating one action.

    When `converged` is false, `alpha` is the best estimate found with
    `eta` executions and `max_error` the residual error.
    """

    action: str
    alpha: npt.NDArray[np.float64]
    eta: int
    max_error: float
    converged: bool
    errors: Tuple[float, ...] = ()  # max error at each tried η

    def apply(self, profile: CalibrationProfile) -> None:
        profile.set_entry(
            self.action,
            self.alpha,
            eta=self.eta,
            max_error=self.max_error,
            converged=self.converged,
        )


def calibrate(
    action: str,
    recorder: Recorder,
    eta0: int,
    eta_max: int,
    err_target: float,
    params: Optional[KWearParams] = None,
) -> CalibrationResult:
    """Calibrate alpha of one action from recorded executions.

    Starting from `eta0` executions, the mean alpha predicts the terminal
    wear of an execution run from null initial conditions. Executions are
    added one at a time until the prediction is within `err_target` of
    every recorded terminal wear, or `eta_max` is reached.

    Parameters
    ----------
    action : str
        Label of the action.
    recorder : list of Trajectory | Callable[[int], Trajectory]
        Recorded executions, or a callback recording the `l`-th one.
    eta0 : int
        Initial number of executions, at least 2.
    eta_max : int
    err_target : float
        Accepted absolute error on the terminal wear.
    params : KWearParams, optional
    """
    params = params or KWearParams()
    if eta0 < 2:
        raise ValueError(f"eta0 must be at least 2, got {eta0}")
    if eta_max < eta0:
        raise ValueError(f"eta_max ({eta_max}) is smaller than eta0 ({eta0})")
    if not err_target > 0:
        raise ValueError(f"err_target must be positive, got {err_target}")

    if callable(recorder):
        record = recorder
        available = eta_max
    else:
        executions_ = list(recorder)
        record = executions_.__getitem__
        available = min(eta_max, len(executions_))

    if available < eta0:
        raise InsufficientExecutionsError(
            f"action `{action}` has {available} execution(s), {eta0} are needed"
        )

    zero = KWearState.zeros()
    executions: List[Trajectory] = [record(i) for i in range(eta0)]
    errors: List[float] = []
    while True:
        alphas = execution_alphas(executions, params)
        alpha = alphas.mean(axis=0)
        v_hat = predict(zero.v, alpha)
        v_rec = np.stack(
            [integrate_trajectory(zero, ex, "charge", params).v for ex in executions]
        )
        err = float(np.max(np.abs(v_rec - v_hat)))
        errors.append(err)
        logging.debug(
            "calibrate `%s`: eta=%d, max error=%.3g", action, len(executions), err
        )

        converged = err <= err_target
        if converged or len(executions) >= available:
            break

        executions.append(record(len(executions)))

    if not converged:
        logging.warning(
            "calibration of `%s` did not converge: error %.3g > %.3g with eta=%d",
            action, err, err_target, len(executions),
        )

    return CalibrationResult(
        action=action,
        alpha=alpha,
        eta=len(executions),
        max_error=err,
        converged=converged,
        errors=tuple(errors),
    )
