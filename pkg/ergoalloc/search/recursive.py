"""Iterative re-planning after every completed action."""

from dataclasses import dataclass
from typing import Callable, Iterator, Optional

import numpy.typing as npt

from ergoalloc.core.assembly import Configuration
from ergoalloc.core.graph import AndOrGraph
from ergoalloc.search.aostar import AllocationPlan, ao_star

__all__ = ["CostRefresh", "NextStep", "recursive_ao_star", "iter_allocations"]

CostRefresh = Callable[[AndOrGraph], npt.ArrayLike]


@dataclass(frozen=True)
class NextStep:
    """The action to dispatch now, and the plan it was taken from."""

    action: int
    agent: int
    arc: int
    cost: float
    plan: AllocationPlan

    @property
    def config(self) -> Configuration:
        """Configuration once the action is completed."""
        return self.plan.steps[0].config


def recursive_ao_star(
    graph: AndOrGraph,
    current_config: Configuration,
    cost_refresh: Optional[CostRefresh] = None,
    *,
    deadline: Optional[float] = None,
) -> NextStep:
    """Re-plan from the current configuration and return its first step.

    Parameters
    ----------
    graph : AndOrGraph
    current_config : Configuration
        Physical state of the cell, not yet complete.
    cost_refresh : Callable[[AndOrGraph], array], optional
        Updates the graph costs and returns the snapshot to search on.
        If not given, the current costs are used.
    """
    if current_config.is_final():
        raise ValueError("the assembly is already complete, nothing to allocate")

    costs = cost_refresh(graph) if cost_refresh is not None else None
    plan = ao_star(
        graph, graph.final_configuration(), current_config, costs, deadline=deadline
    )
    first = plan.steps[0]
    return NextStep(first.action, first.agent, first.arc, first.cost, plan)


def iter_allocations(
    graph: AndOrGraph,
    cost_refresh: Optional[CostRefresh] = None,
    start_config: Optional[Configuration] = None,
) -> Iterator[NextStep]:
    """Allocate actions one at a time until the assembly is complete.

    Each yielded step is assumed completed before the next one is asked
    for, the caller can refresh its state in between.
    """
    config = start_config or graph.initial_configuration()
    while not config.is_final():
        step = recursive_ao_star(graph, config, cost_refresh)
        yield step
        config = step.config
