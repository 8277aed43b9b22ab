import numpy as np
import pytest

from ergoalloc.kwear import JOINTS, TrajectoryTemplate
from ergoalloc.sim import synthesize_executions, synthesize_trajectory

BANDS = {
    "shoulder": [1, 2, 3, 4],
    "elbow": [1, 2],
    "wrist": [1, 2, 3],
    "trunk": [1, 2, 3, 4],
    "neck": [1, 2, 3, 4],
}


@pytest.mark.parametrize(
    "joint, band", [(j, b) for j, bands in BANDS.items() for b in bands]
)
@pytest.mark.parametrize("background", [1, 2])
def test_scores_stay_in_band(joint, band, background):
    tpl = TrajectoryTemplate((joint,), band, 5.0, background=background)
    for variant in range(3):
        traj = synthesize_trajectory(tpl, seed=3, variant=variant)
        for i, j in enumerate(JOINTS):
            expected = band if j == joint else background
            assert np.all(traj.scores[:, i] == expected)


def test_sampling():
    traj = synthesize_trajectory(TrajectoryTemplate(("neck",), 3, 15.0))
    assert len(traj) == 301
    assert traj.t[-1] == pytest.approx(15.0)
    assert traj.postures is not None


def test_deterministic():
    tpl = TrajectoryTemplate(("shoulder", "neck"), 3, 6.0)
    a = synthesize_trajectory(tpl, seed=1, stream=2, variant=0)
    b = synthesize_trajectory(tpl, seed=1, stream=2, variant=0)
    c = synthesize_trajectory(tpl, seed=1, stream=2, variant=1)
    np.testing.assert_array_equal(a.postures, b.postures)
    assert not np.array_equal(a.postures, c.postures)
    np.testing.assert_array_equal(a.scores, c.scores)


def test_dominant_joint_wears_most():
    traj = synthesize_trajectory(TrajectoryTemplate(("trunk",), 4, 15.0))
    integral = traj.score_integral()
    assert int(np.argmax(integral)) == JOINTS.index("trunk")
    assert integral[JOINTS.index("trunk")] == pytest.approx(60.0)


def test_missing_band():
    with pytest.raises(ValueError):
        synthesize_trajectory(TrajectoryTemplate(("elbow",), 3, 5.0))


def test_executions():
    tpl = TrajectoryTemplate(("wrist",), 3, 2.0, executions=4)
    executions = synthesize_executions(tpl, seed=5)
    assert len(executions) == 4
    assert len({ex.source for ex in executions}) == 4
