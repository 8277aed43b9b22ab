"""AO* over assembly configurations.

Notes
-----
The search walks an auxiliary tree of configurations top-down: it
starts from the complete assembly and replaces one sub-assembly by the
two children of one of its hyper-arcs at a time, until the goal
configuration (the current physical state of the cell) is reached. The
plan is then read bottom-up through the father pointers, so its first
step is the join executable right now.

No heuristic is used, the frontier is popped by minimum accumulated
cost. Ties are broken by the canonical configuration and then by the id
of the hyper-arc that produced the state, so equal cost snapshots
always give equal plans.
"""

import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Set, Tuple

import numpy as np
import numpy.typing as npt

from ergoalloc.core.assembly import Configuration, is_union_of
from ergoalloc.core.errors import (
    InvalidAssemblyError,
    NoFeasiblePlanError,
    SearchTimeoutError,
)
from ergoalloc.core.graph import AndOrGraph
from ergoalloc.utils import Stopwatch

__all__ = [
    "SearchState",
    "SearchStats",
    "PlanStep",
    "AllocationPlan",
    "ao_star",
    "search_stats",
]

CHECK_DEADLINE_EVERY = 256


@dataclass(order=True)
class SearchState:
    """A node of the auxiliary tree.

    Ordering is the frontier priority: score, then configuration, then
    the producing hyper-arc (-1 for the start).
    """

    score: float
    config: Configuration
    via_arc: int = -1
    father: Optional["SearchState"] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SearchStats:
    expanded: int = 0
    generated: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True)
class PlanStep:
    """Join the children of `arc` into its father.

    Attributes
    ----------
    action, agent, arc : int
    cost : float
        Cost of the arc in the snapshot the plan was searched on.
    config : Configuration
        Configuration after the join.
    """

    action: int
    agent: int
    arc: int
    cost: float
    config: Configuration


@dataclass(frozen=True)
class AllocationPlan:
    """Ordered joins from the goal configuration to the complete assembly."""

    steps: Tuple[PlanStep, ...]
    total_cost: float
    goal: Configuration
    stats: SearchStats = field(default_factory=SearchStats, compare=False)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[PlanStep]:
        return iter(self.steps)

    def pairs(self) -> List[Tuple[int, int]]:
        """(action, agent) of every step."""
        return [(s.action, s.agent) for s in self.steps]

    def arcs(self) -> Tuple[int, ...]:
        return tuple(s.arc for s in self.steps)

    def records(self, graph: AndOrGraph) -> List[Dict[str, Any]]:
        out, cumulative = [], 0.0
        for i, s in enumerate(self.steps):
            cumulative += s.cost
            out.append(
                {
                    "step": i,
                    "action": graph.actions[s.action],
                    "agent": graph.workers[s.agent].name,
                    "arc": s.arc,
                    "cost": s.cost,
                    "cumulative": cumulative,
                    "parts": [graph.node_label(p) for p in s.config],
                }
            )
        return out

    def to_dict(self, graph: AndOrGraph) -> Dict[str, Any]:
        return {
            "schema": 1,
            "total_cost": self.total_cost,
            "goal": [graph.node_label(p) for p in self.goal],
            "steps": self.records(graph),
            "stats": {
                "expanded": self.stats.expanded,
                "generated": self.stats.generated,
            },
        }

    def to_text(self, graph: AndOrGraph) -> str:
        lines = [f"plan: {len(self)} step(s), total cost {self.total_cost:.4f}"]
        for r in self.records(graph):
            lines.append(
                f"{r['step']:>3}  {r['action']:<16} {r['agent']:<10} "
                f"{r['cost']:>10.4f} {r['cumulative']:>10.4f}"
            )
        return "\n".join(lines)


def ao_star(
    graph: AndOrGraph,
    start_config: Optional[Configuration] = None,
    goal_config: Optional[Configuration] = None,
    costs: Optional[npt.ArrayLike] = None,
    *,
    deadline: Optional[float] = None,
) -> AllocationPlan:
    """Minimum-cost plan joining `goal_config` into the complete assembly.

    Parameters
    ----------
    graph : AndOrGraph
    start_config : Configuration, optional
        The complete assembly, the default.
    goal_config : Configuration, optional
        Current configuration of the cell, all pieces separated by
        default.
    costs : array of shape (n_arcs,), optional
        Cost snapshot, defaults to a copy of the graph's costs.
    deadline : float, optional
        Absolute `time.perf_counter()` value after which the search
        gives up.

    Raises
    ------
    NoFeasiblePlanError
        The goal cannot be reached along non-pruned hyper-arcs.
    SearchTimeoutError
        The deadline passed.
    """
    start = start_config or graph.final_configuration()
    goal = goal_config or graph.initial_configuration()
    if not start.is_final():
        raise ValueError(f"search must start from the complete assembly, got {start!r}")
    _check_goal(graph, goal)

    snapshot = graph.cost_snapshot() if costs is None else np.asarray(costs, np.float64)
    if snapshot.shape != graph.costs.shape:
        raise ValueError(f"expected {graph.costs.shape} costs, got {snapshot.shape}")

    with Stopwatch() as sw:
        found, expanded, generated = _search(graph, start, goal, snapshot, deadline)

    stats = SearchStats(expanded, generated, sw.elapsed)
    if found is None:
        raise NoFeasiblePlanError(f"no feasible plan reaches {goal!r}")

    steps = []
    state = found
    while state.father is not None:
        arc = state.via_arc
        steps.append(
            PlanStep(
                action=int(graph.action[arc]),
                agent=int(graph.agent[arc]),
                arc=arc,
                cost=float(snapshot[arc]),
                config=state.father.config,
            )
        )
        state = state.father

    total = math.fsum(s.cost for s in steps)
    return AllocationPlan(tuple(steps), total, goal, stats)


def search_stats(plan: AllocationPlan) -> SearchStats:
    """Counters and wall time of the search that produced `plan`."""
    return plan.stats


def _search(
    graph: AndOrGraph,
    start: Configuration,
    goal: Configuration,
    costs: npt.NDArray[np.float64],
    deadline: Optional[float],
) -> Tuple[Optional[SearchState], int, int]:
    goal_parts = set(goal.parts)
    arcs_by_father = graph.arcs_by_father
    pruned, left, right = graph.pruned, graph.left, graph.right

    # hyper-arcs whose children keep the goal reachable, per father
    usable: Dict[int, List[int]] = {}

    def successors(part: int) -> List[int]:
        if part not in usable:
            usable[part] = [
                i
                for i in arcs_by_father.get(part, ())
                if not pruned[i]
                and is_union_of(left[i], goal.parts)
                and is_union_of(right[i], goal.parts)
            ]
        return usable[part]

    root = SearchState(0.0, start)
    best: Dict[Configuration, float] = {start: 0.0}
    open_: List[SearchState] = [root]
    closed: Set[Configuration] = set()
    expanded, generated = 0, 1
    while open_:
        if deadline is not None and expanded % CHECK_DEADLINE_EVERY == 0:
            if time.perf_counter() > deadline:
                raise SearchTimeoutError(
                    f"search timed out after {expanded} expansions"
                )

        curr = heapq.heappop(open_)
        if curr.score > best[curr.config] or curr.config in closed:
            continue  # stale entry

        if curr.config == goal:
            return curr, expanded, generated

        closed.add(curr.config)
        expanded += 1
        for part in curr.config:
            if part in goal_parts:
                continue

            for i in successors(part):
                child = curr.config.split(part, left[i], right[i])
                score = curr.score + costs[i]
                generated += 1
                if score < best.get(child, math.inf):
                    best[child] = score
                    closed.discard(child)  # re-open
                    heapq.heappush(open_, SearchState(score, child, i, curr))

    return None, expanded, generated


def _check_goal(graph: AndOrGraph, goal: Configuration) -> None:
    n = graph.n_pieces
    try:
        Configuration.from_parts(goal.parts, n)
    except InvalidAssemblyError as e:
        raise InvalidAssemblyError(f"goal is not a configuration of {n} pieces") from e
