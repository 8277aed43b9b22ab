"""Dynamic role allocation over simulated repetitions.

Notes
-----
Every repetition starts from all pieces separated. After each completed
action the hyper-arc costs are refreshed from the current wear, the
search is run again from the present configuration and its first step is
dispatched. Wear persists across repetitions, so the same action may be
given to different workers as the human gets tired.
"""

import logging
import math
import warnings
from collections import defaultdict
from typing import Dict, Optional, Tuple

import numpy as np
import numpy.typing as npt

from ergoalloc.allocation.costs import CostPolicy, human_action_cost, refresh_costs
from ergoalloc.allocation.trace import AllocationTrace, TaktRecord, TraceRecord
from ergoalloc.core.errors import (
    CalibrationMissingError,
    CollaborationAborted,
    NoFeasiblePlanError,
)
from ergoalloc.core.graph import AndOrGraph
from ergoalloc.core.scenario import Scenario
from ergoalloc.kwear.calibration import CalibrationProfile
from ergoalloc.kwear.model import KWearLog, KWearState
from ergoalloc.kwear.rula import JOINTS
from ergoalloc.search.recursive import recursive_ao_star
from ergoalloc.sim.clock import SimClock
from ergoalloc.sim.executor import (
    TaktConfig,
    execute_human_action,
    execute_robot_action,
    takt_pause,
)
from ergoalloc.sim.recorder import TrajectorySource

__all__ = ["run_collaboration"]


def run_collaboration(
    scenario: Scenario,
    repetitions: int,
    profile: CalibrationProfile,
    *,
    graph: Optional[AndOrGraph] = None,
    policy: Optional[CostPolicy] = None,
    log: Optional[KWearLog] = None,
    source: Optional[TrajectorySource] = None,
) -> AllocationTrace:
    """Simulate `repetitions` assemblies with dynamic allocation.

    Parameters
    ----------
    scenario : Scenario
    repetitions : int
    profile : CalibrationProfile
        Must hold every action the human may be assigned.
    graph : AndOrGraph, optional
        Built from the scenario if not given. Its costs are overwritten.
    policy : CostPolicy, optional
        Built from the scenario if not given.
    log : KWearLog, optional
        Receives the wear of every joint at every tick.
    source : TrajectorySource, optional
        Human executions, shared with calibration to reuse its cache.

    Raises
    ------
    CalibrationMissingError
        An action the human may take is not calibrated.
    CollaborationAborted
        No feasible plan from some configuration.
    """
    if repetitions < 0:
        raise ValueError(f"repetitions must be non-negative, got {repetitions}")

    if missing := profile.missing(scenario.human_actions()):
        raise CalibrationMissingError(
            f"no calibration for action(s): {', '.join(missing)}"
        )

    graph = graph if graph is not None else scenario.build_graph()
    policy = policy or CostPolicy.from_scenario(scenario)
    source = source or TrajectorySource(scenario)
    takt = TaktConfig.from_scenario(scenario)
    params = scenario.kwear

    clock = SimClock(source.tick)
    state = KWearState.zeros()
    human = graph.human_index()
    variants: Dict[str, int] = defaultdict(int)
    trace = AllocationTrace()

    snapshot: npt.NDArray[np.float64] = graph.cost_snapshot()

    def refresh(g: AndOrGraph) -> npt.NDArray[np.float64]:
        nonlocal snapshot
        snapshot = refresh_costs(g, state, profile, policy)
        return snapshot

    for rep in range(repetitions):
        config = graph.initial_configuration()
        start, step = clock.now, 0
        while not config.is_final():
            try:
                nxt = recursive_ao_star(graph, config, refresh)
            except NoFeasiblePlanError as e:
                raise CollaborationAborted(
                    f"repetition {rep}, step {step}: {e}", trace
                ) from e

            label = graph.actions[nxt.action]
            worker = graph.workers[nxt.agent]
            spec = scenario.action_spec(label)
            human_cost, robot_cost = _arc_costs(graph, snapshot, nxt.action, human)
            v_hat = (
                human_action_cost(state, label, profile, policy)[1]
                if label in profile
                else np.full(len(JOINTS), math.nan)
            )

            note = ""
            if worker.is_human():
                if np.any(v_hat >= np.asarray(policy.v_th)):
                    note = "human over threshold"
                    warnings.warn(
                        f"`{label}` goes to the human over threshold, "
                        "no other worker can take it"
                    )
                state, elapsed = execute_human_action(
                    clock,
                    state,
                    spec,
                    params,
                    trajectories=source,
                    variant=variants[label],
                    log=log,
                )
                variants[label] += 1
            else:
                state, elapsed = execute_robot_action(
                    clock, state, spec, worker, params, log=log
                )

            logging.info(
                "repetition %d, step %d: `%s` to `%s`, cost %.4f",
                rep,
                step,
                label,
                worker.name,
                nxt.cost,
            )
            stats = nxt.plan.stats
            trace.append(
                TraceRecord(
                    repetition=rep,
                    step=step,
                    action=label,
                    agent=worker.name,
                    kind=worker.kind,
                    v_hat=tuple(float(v) for v in v_hat),
                    human_cost=human_cost,
                    robot_cost=robot_cost,
                    cost=nxt.cost,
                    wear=tuple(float(v) for v in state.v),
                    elapsed=elapsed,
                    time=clock.now,
                    expanded=stats.expanded,
                    generated=stats.generated,
                    search_time=stats.wall_time,
                    note=note,
                )
            )
            config = nxt.config
            step += 1

        elapsed = clock.now - start
        state, pause, violated = takt_pause(
            clock, state, elapsed, takt, params, log=log
        )
        trace.append_takt(TaktRecord(rep, elapsed, pause, violated))

    return trace


def _arc_costs(
    graph: AndOrGraph,
    snapshot: npt.NDArray[np.float64],
    action: int,
    human: Optional[int],
) -> Tuple[float, float]:
    """Cost of the human arcs and of the cheapest robot arc of an action."""
    on_action = (graph.action == action) & ~graph.pruned
    is_human = graph.agent == (human if human is not None else -1)

    human_costs = snapshot[on_action & is_human]
    robot_costs = snapshot[on_action & ~is_human]
    return (
        float(human_costs.min()) if len(human_costs) else math.nan,
        float(robot_costs.min()) if len(robot_costs) else math.nan,
    )
