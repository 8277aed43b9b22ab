import math

import numpy as np
import pytest

from conftest import chain_data
from ergoalloc.core import ActionExecutionSpec, Worker, parse_scenario
from ergoalloc.kwear import JOINTS, KWearLog, KWearParams, KWearState, Trajectory
from ergoalloc.sim import (
    SimClock,
    TaktConfig,
    TrajectorySource,
    execute_human_action,
    execute_robot_action,
    rest,
    takt_pause,
)

PARAMS = KWearParams()
ROBOT = Worker("robot", "robot", 50.0)


def long_trunk_scenario(seconds: float = 240):
    tpl = {"dominant": "trunk", "band": 3, "duration": seconds}
    return parse_scenario(chain_data([tpl]))


def test_human_action_charges():
    scenario = long_trunk_scenario()
    clock, log = SimClock(), KWearLog()
    state, elapsed = execute_human_action(
        clock,
        KWearState.zeros(),
        scenario.action_spec("a1"),
        PARAMS,
        trajectories=TrajectorySource(scenario),
        log=log,
    )
    assert elapsed == pytest.approx(240)
    assert clock.now == pytest.approx(240)
    assert state.t == pytest.approx(240)
    assert state["trunk"] == pytest.approx(0.993, abs=1e-6)
    assert state["neck"] == pytest.approx(1 - math.exp(-240 / PARAMS.capacity))
    assert len(log) == 4800


def test_robot_action_recovers():
    scenario = long_trunk_scenario()
    clock = SimClock()
    state = KWearState(np.full(len(JOINTS), 0.993))
    state, elapsed = execute_robot_action(
        clock, state, scenario.action_spec("a1"), ROBOT, PARAMS
    )
    assert elapsed == pytest.approx(240)
    np.testing.assert_allclose(state.v, 0.007, atol=1e-6)


def test_robot_action_factor():
    scenario = parse_scenario(
        chain_data([{"dominant": "trunk", "band": 3, "duration": 30}])
    )
    state = KWearState(np.full(len(JOINTS), 0.5))
    state, _ = execute_robot_action(
        SimClock(), state, scenario.action_spec("a1"), ROBOT, PARAMS
    )
    np.testing.assert_allclose(state.v / 0.5, 0.538, atol=1e-3)


def test_robot_without_duration():
    spec = ActionExecutionSpec(0, "a1", {"human": 5.0})
    with pytest.raises(ValueError):
        execute_robot_action(SimClock(), KWearState.zeros(), spec, ROBOT, PARAMS)


def test_rest_nothing():
    clock = SimClock()
    state = KWearState(np.full(len(JOINTS), 0.3))
    out, elapsed = rest(clock, state, 0.01, PARAMS)
    assert elapsed == 0
    np.testing.assert_array_equal(out.v, state.v)


def test_takt_pause():
    clock = SimClock()
    clock.advance(30)
    state = KWearState(np.full(len(JOINTS), 0.5), t=30)
    out, pause, violated = takt_pause(clock, state, 30, TaktConfig(38), PARAMS)
    assert pause == pytest.approx(8)
    assert not violated
    assert clock.now == pytest.approx(38)
    factor = math.exp(-PARAMS.recovery_rate / PARAMS.capacity * 8)
    np.testing.assert_allclose(out.v, 0.5 * factor)


def test_takt_violation():
    clock = SimClock()
    state = KWearState(np.full(len(JOINTS), 0.5))
    out, pause, violated = takt_pause(clock, state, 40, TaktConfig(38), PARAMS)
    assert (pause, violated) == (0, True)
    assert out is state
    assert clock.now == 0


def test_no_takt():
    state = KWearState.zeros()
    assert takt_pause(SimClock(), state, 40, TaktConfig(), PARAMS) == (state, 0, False)


def test_takt_config():
    with pytest.raises(ValueError):
        TaktConfig(0)

    data = chain_data(
        [{"dominant": "trunk", "band": 3, "duration": 15}] * 2, takt={"t_takt": 20}
    )
    with pytest.warns(UserWarning):
        cfg = TaktConfig.from_scenario(parse_scenario(data))
    assert cfg.t_takt == 20


class EmptySource(TrajectorySource):
    def get(self, spec, variant):
        return Trajectory.empty()


def test_human_action_empty_trajectory():
    scenario = long_trunk_scenario()
    clock = SimClock()
    state0 = KWearState(np.full(len(JOINTS), 0.3))
    state, elapsed = execute_human_action(
        clock,
        state0,
        scenario.action_spec("a1"),
        PARAMS,
        trajectories=EmptySource(scenario),
    )
    assert elapsed == 0
    assert clock.now == 0
    np.testing.assert_array_equal(state.v, state0.v)
