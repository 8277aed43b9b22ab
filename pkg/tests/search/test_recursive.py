import numpy as np
import pytest

from ergoalloc.core import Configuration, build_sequential
from ergoalloc.search import ao_star, iter_allocations, recursive_ao_star


def test_complete_assembly():
    g = build_sequential(3, 2)
    with pytest.raises(ValueError):
        recursive_ao_star(g, g.final_configuration())


def test_last_step():
    g = build_sequential(3, 2)
    g.set_costs(np.arange(1, g.number_of_arcs() + 1, dtype=np.float64))
    config = Configuration.from_parts([0b011, 0b100], 3)
    nxt = recursive_ao_star(g, config)
    assert len(nxt.plan) == 1
    assert nxt.config.is_final()
    assert g.left[nxt.arc] == 0b011 and g.right[nxt.arc] == 0b100
    cut = [i for i in g.arcs_by_father[0b111] if g.left[i] == 0b011]
    assert nxt.cost == min(g.costs[cut])


def test_static_costs_follow_the_plan():
    g = build_sequential(6, 3)
    g.set_costs(np.random.default_rng(0).uniform(0, 100, g.number_of_arcs()))
    plan = ao_star(g)

    steps = list(iter_allocations(g))
    assert len(steps) == len(plan)
    assert sorted(s.arc for s in steps) == sorted(plan.arcs())
    assert sum(s.cost for s in steps) == pytest.approx(plan.total_cost)
    assert steps[0].arc == plan.steps[0].arc


def test_refresh_before_each_step():
    g = build_sequential(4, 2)
    calls = []

    def refresh(graph):
        calls.append(len(calls))
        costs = np.ones(graph.number_of_arcs())
        costs[graph.agent == 0] = 1 + len(calls)  # human gets dearer
        graph.set_costs(costs)
        return graph.cost_snapshot()

    steps = list(iter_allocations(g, refresh))
    assert len(calls) == len(steps) == 3
    assert all(g.workers[s.agent].name == "robot" for s in steps)


def test_replanning_changes_allocation():
    g = build_sequential(3, 2)
    state = {"human": 0.0}

    def refresh(graph):
        costs = np.where(graph.agent == 0, state["human"], 1.0)
        graph.set_costs(costs)
        return graph.cost_snapshot()

    agents = []
    for step in iter_allocations(g, refresh):
        agents.append(g.workers[step.agent].name)
        state["human"] = 5.0  # wear after the first action
    assert agents == ["human", "robot"]
