"""Hyper-arc costs from predicted ergonomic risk.

Notes
-----
The human cost of an action is the sum over joints of the wear
predicted at its end, plus a penalty `gamma` for each joint reaching its
threshold. Robots have a constant cost per worker, which sets how much
of the work they take.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, Mapping, Tuple

import numpy as np
import numpy.typing as npt
from typing_extensions import Self

from ergoalloc.core.graph import AndOrGraph
from ergoalloc.core.scenario import Scenario
from ergoalloc.kwear.calibration import CalibrationProfile
from ergoalloc.kwear.model import KWearState, predict
from ergoalloc.kwear.rula import JOINTS

__all__ = ["CostPolicy", "human_action_cost", "refresh_costs"]


@dataclass(frozen=True)
class CostPolicy:
    """Thresholds, penalty and robot costs.

    Attributes
    ----------
    v_th : tuple of float
        Wear threshold per joint, in `JOINTS` order.
    gamma : float
        Penalty of a joint over threshold, larger than `v_max`.
    robot_cost : dict of str to float
        Constant cost per robot worker name.
    v_max : float
    """

    v_th: Tuple[float, ...] = (0.8,) * len(JOINTS)
    gamma: float = 100.0
    robot_cost: Mapping[str, float] = field(default_factory=lambda: {"robot": 50.0})
    v_max: float = 0.993

    def __post_init__(self) -> None:
        if len(self.v_th) != len(JOINTS):
            raise ValueError(f"expected {len(JOINTS)} thresholds, got {len(self.v_th)}")
        if any(not 0 < v < 1 for v in self.v_th):
            raise ValueError(f"thresholds must be in (0, 1), got {self.v_th}")
        if not self.gamma > self.v_max:
            raise ValueError(f"gamma ({self.gamma}) must exceed v_max ({self.v_max})")

        upper = self.v_max * len(JOINTS) + self.gamma
        for name, cost in self.robot_cost.items():
            if not math.isfinite(cost) or cost < 0:
                raise ValueError(f"robot cost of `{name}` must be non-negative")
            if not max(self.v_th) < cost < upper:
                warnings.warn(
                    f"robot cost {cost} of `{name}` is outside "
                    f"({max(self.v_th)}, {upper:g}), allocation may be one-sided"
                )

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> Self:
        return cls(
            v_th=scenario.v_th,
            gamma=scenario.gamma,
            robot_cost={w.name: float(w.cost or 0.0) for w in scenario.robots()},
            v_max=scenario.kwear.v_max,
        )

    def guarded(self) -> bool:
        """Whether a robot always beats a human arc over threshold."""
        m = len(self.v_th)
        return all(c + (m - 1) < self.gamma for c in self.robot_cost.values())


def human_action_cost(
    state: KWearState, action: str, profile: CalibrationProfile, policy: CostPolicy
) -> Tuple[float, npt.NDArray[np.float64]]:
    """Cost of the human doing `action` next.

    Returns
    -------
    cost : float
    v_hat : array of shape (m,)
        Predicted wear per joint at the end of the action.

    Raises
    ------
    CalibrationMissingError
    """
    v_hat = predict(state.v, profile.alphas(action))
    over = v_hat >= np.asarray(policy.v_th)
    gamma = v_hat + np.where(over, policy.gamma, 0.0)
    return float(np.sum(gamma)), v_hat


def refresh_costs(
    graph: AndOrGraph,
    state: KWearState,
    profile: CalibrationProfile,
    policy: CostPolicy,
) -> npt.NDArray[np.float64]:
    """Write every human and robot arc cost, return a read-only snapshot.

    Actions whose human arcs are all pruned need no calibration.
    """
    costs = graph.costs.copy()
    cache: Dict[int, float] = {}
    for i, w in enumerate(graph.workers):
        on_worker = graph.agent == i
        for a, label in enumerate(graph.actions):
            ids = graph.arc_ids(a, i)
            if len(ids) == 0:
                continue

            if w.is_human():
                if a not in cache:
                    cache[a], _ = human_action_cost(state, label, profile, policy)
                costs[on_worker & (graph.action == a)] = cache[a]
            else:
                costs[on_worker & (graph.action == a)] = policy.robot_cost[w.name]

    graph.set_costs(costs)
    return graph.cost_snapshot()
