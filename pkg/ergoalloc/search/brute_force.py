"""Exhaustive plan enumeration, an oracle for small graphs."""

import math
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from ergoalloc.core.assembly import Configuration, SubAssembly, is_union_of
from ergoalloc.core.errors import NoFeasiblePlanError, SearchTooLargeError
from ergoalloc.core.graph import AndOrGraph
from ergoalloc.search.aostar import AllocationPlan, PlanStep

__all__ = ["count_plans", "enumerate_plans", "best_plan_cost"]

MAX_PLANS = 10**6


def count_plans(graph: AndOrGraph, goal_config: Optional[Configuration] = None) -> int:
    """Number of distinct decompositions of the root down to the goal."""
    goal = goal_config or graph.initial_configuration()
    goal_parts = set(goal.parts)

    @lru_cache(maxsize=None)
    def count(node: SubAssembly) -> int:
        if node in goal_parts:
            return 1
        return sum(
            count(graph.left[i]) * count(graph.right[i])
            for i in _usable(graph, node, goal)
        )

    return count(graph.root)


def enumerate_plans(
    graph: AndOrGraph,
    goal_config: Optional[Configuration] = None,
    costs: Optional[npt.ArrayLike] = None,
    *,
    limit: int = MAX_PLANS,
) -> List[AllocationPlan]:
    """Every plan joining `goal_config` into the complete assembly.

    A plan is a choice of one hyper-arc for every sub-assembly of the
    decomposition, so plans differing only in the order of independent
    joins are counted once. Steps are listed children first.

    Raises
    ------
    SearchTooLargeError
        More than `limit` plans.
    """
    goal = goal_config or graph.initial_configuration()
    snapshot = _snapshot(graph, costs)

    plans = []
    for arcs in _decompositions(graph, goal, limit):
        config, steps = goal, []
        for i in arcs:
            config = config.join(graph.left[i], graph.right[i])
            steps.append(
                PlanStep(
                    action=int(graph.action[i]),
                    agent=int(graph.agent[i]),
                    arc=i,
                    cost=float(snapshot[i]),
                    config=config,
                )
            )
        total = math.fsum(s.cost for s in steps)
        plans.append(AllocationPlan(tuple(steps), total, goal))
    return plans


def best_plan_cost(
    graph: AndOrGraph,
    goal_config: Optional[Configuration] = None,
    costs: Optional[npt.ArrayLike] = None,
    *,
    limit: int = MAX_PLANS,
) -> float:
    """Minimum total cost over every enumerated plan."""
    goal = goal_config or graph.initial_configuration()
    snapshot = _snapshot(graph, costs)
    totals = [
        math.fsum(float(snapshot[i]) for i in arcs)
        for arcs in _decompositions(graph, goal, limit)
    ]
    if len(totals) == 0:
        raise NoFeasiblePlanError("no plan reaches the goal")
    return min(totals)


def _decompositions(
    graph: AndOrGraph, goal: Configuration, limit: int
) -> List[Tuple[int, ...]]:
    n = count_plans(graph, goal)
    if n > limit:
        raise SearchTooLargeError(f"{n} plans exceed the limit of {limit}")

    goal_parts = set(goal.parts)

    def decompose(node: SubAssembly) -> List[Tuple[int, ...]]:
        if node in goal_parts:
            return [()]

        out = []
        for i in _usable(graph, node, goal):
            for lhs in decompose(graph.left[i]):
                for rhs in decompose(graph.right[i]):
                    out.append(lhs + rhs + (i,))
        return out

    return decompose(graph.root)


def _usable(graph: AndOrGraph, node: SubAssembly, goal: Configuration) -> List[int]:
    return [
        i
        for i in graph.arcs_by_father.get(node, ())
        if not graph.pruned[i]
        and is_union_of(graph.left[i], goal.parts)
        and is_union_of(graph.right[i], goal.parts)
    ]


def _snapshot(graph: AndOrGraph, costs: Optional[npt.ArrayLike]) -> npt.NDArray:
    if costs is None:
        return graph.cost_snapshot()

    snapshot = np.asarray(costs, dtype=np.float64)
    if snapshot.shape != graph.costs.shape:
        raise ValueError(f"expected {graph.costs.shape} costs, got {snapshot.shape}")
    return snapshot
