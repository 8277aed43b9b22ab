import numpy as np
import pytest

from ergoalloc.allocation import CostPolicy, human_action_cost, refresh_costs
from ergoalloc.core import CalibrationMissingError, parse_scenario
from ergoalloc.kwear import JOINTS, CalibrationProfile, KWearState


def test_cost_below_threshold():
    profile = CalibrationProfile.uniform(["a1"], 1.0)
    state = KWearState(np.full(len(JOINTS), 0.1))
    cost, v_hat = human_action_cost(state, "a1", profile, CostPolicy())
    assert cost == pytest.approx(0.5)
    np.testing.assert_allclose(v_hat, 0.1)


def test_cost_over_threshold():
    profile = CalibrationProfile.uniform(["a1"], 1.0)
    state = KWearState(np.array([0.85, 0.1, 0.1, 0.1, 0.1]))
    cost, _ = human_action_cost(state, "a1", profile, CostPolicy())
    assert cost == pytest.approx(101.25)


def test_threshold_is_inclusive():
    profile = CalibrationProfile.uniform(["a1"], 1.0)
    state = KWearState(np.array([0.8, 0, 0, 0, 0]))
    cost, _ = human_action_cost(state, "a1", profile, CostPolicy())
    assert cost == pytest.approx(100.8)


def test_cost_uses_prediction():
    profile = CalibrationProfile()
    profile.set_entry("a1", [0.5, 1, 1, 1, 1])
    cost, v_hat = human_action_cost(KWearState.zeros(), "a1", profile, CostPolicy())
    assert v_hat[0] == pytest.approx(0.5)
    assert cost == pytest.approx(0.5)


def test_uncalibrated_action():
    with pytest.raises(CalibrationMissingError):
        human_action_cost(KWearState.zeros(), "a1", CalibrationProfile(), CostPolicy())


def test_refresh(fixed_scenario):
    graph, scenario = fixed_scenario
    profile = CalibrationProfile.uniform(scenario.action_labels, 1.0)
    state = KWearState(np.full(len(JOINTS), 0.2))
    snapshot = refresh_costs(graph, state, profile, CostPolicy.from_scenario(scenario))

    np.testing.assert_allclose(snapshot[graph.agent == 0], 1.0)
    np.testing.assert_allclose(snapshot[graph.agent == 1], 50.0)
    np.testing.assert_array_equal(snapshot, graph.costs)
    assert not snapshot.flags.writeable


def test_refresh_skips_pruned_human_arcs(fixed_data):
    fixed_data["prune"] = [["a5", "human"]]
    scenario = parse_scenario(fixed_data)
    graph = scenario.build_graph()
    profile = CalibrationProfile.uniform(["a1", "a2", "a3", "a4"], 1.0)
    assert scenario.human_actions() == ["a1", "a2", "a3", "a4"]

    snapshot = refresh_costs(
        graph, KWearState.zeros(), profile, CostPolicy.from_scenario(scenario)
    )
    assert snapshot[graph.arc_ids("a5", "robot")].tolist() == [50.0]


def test_policy():
    policy = CostPolicy()
    assert policy.guarded()
    assert not CostPolicy(robot_cost={"robot": 97.0}).guarded()

    with pytest.raises(ValueError):
        CostPolicy(gamma=0.9)
    with pytest.raises(ValueError):
        CostPolicy(v_th=(0.8,) * 4)
    with pytest.raises(ValueError):
        CostPolicy(v_th=(0.8, 0.8, 0.8, 0.8, 1.0))
    with pytest.raises(ValueError):
        CostPolicy(robot_cost={"robot": -1.0})
    with pytest.warns(UserWarning):
        CostPolicy(robot_cost={"robot": 0.5})


def test_policy_from_scenario(takt_scenario):
    _, scenario = takt_scenario
    policy = CostPolicy.from_scenario(scenario)
    assert policy.robot_cost == {"robot": 2.5}
    assert policy.v_th == (0.8,) * len(JOINTS)
    assert policy.gamma == 100
