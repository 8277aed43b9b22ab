import json
import os

import numpy as np
import pandas as pd
import pytest

from conftest import chain_data, write_scenario
from ergoalloc.cli import EXIT_INVALID, EXIT_MISSING, EXIT_NOT_CONVERGED, EXIT_OK, main
from ergoalloc.kwear import JOINTS, Trajectory

FIXED = "corner_joint_fixed"


def run(capsys, *argv: str):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def read(fname: str) -> str:
    with open(fname, encoding="utf-8") as f:
        return f.read()


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["--sequential", 20, "--agents", 2], "nodes: 210, arcs: 2660"),
        (["--scarce", 20, "--agents", 2], "nodes: 39, arcs: 38"),
        (["--sequential", 4, "--agents", 1], "nodes: 10, arcs: 10"),
        (["--scenario", FIXED], "nodes: 11, arcs: 10"),
    ],
)
def test_graph_counts(capsys, argv, expected):
    code, out, _ = run(capsys, "graph", *argv)
    assert code == EXIT_OK
    assert out.strip() == expected


def test_graph_json_and_dot(capsys, tmp_path):
    dot = os.path.join(tmp_path, "g.dot")
    code, out, _ = run(
        capsys, "graph", "--scenario", FIXED, "--format", "json", "--dot", dot
    )
    assert code == EXIT_OK
    stats = json.loads(out)
    assert (stats["nodes"], stats["arcs"]) == (11, 10)
    assert (stats["pieces"], stats["agents"]) == (6, 2)
    assert len(stats["topology"]) == 40
    assert read(dot).startswith("digraph")


@pytest.mark.parametrize("argv", [[], ["--sequential", 1]])
def test_graph_invalid(capsys, argv):
    code, _, err = run(capsys, "graph", *argv)
    assert code == EXIT_INVALID
    assert err.startswith("error: ")


def test_plan(capsys):
    code, out, _ = run(capsys, "plan", "--scenario", FIXED, "--format", "json")
    assert code == EXIT_OK
    plan = json.loads(out)
    assert plan["total_cost"] == 5
    assert [s["action"] for s in plan["steps"]] == ["a1", "a2", "a3", "a4", "a5"]


def test_plan_text_and_csv(capsys):
    code, out, _ = run(capsys, "plan", "--scenario", FIXED)
    assert code == EXIT_OK
    assert out.startswith("plan: 5 step(s), total cost 5.0000")

    code, out, _ = run(capsys, "plan", "--scenario", FIXED, "--format", "csv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "# schema: 1"
    assert lines[1] == "step,action,agent,arc,cost,cumulative"
    assert len(lines) == 7


def test_plan_with_costs(capsys, tmp_path):
    fname = os.path.join(tmp_path, "costs.json")
    with open(fname, "w", encoding="utf-8") as f:
        json.dump(
            {
                "costs": [
                    {"action": "a2", "agent": "human", "cost": 105},
                    {"action": "a2", "agent": "robot", "cost": 50},
                ]
            },
            f,
        )

    code, out, _ = run(
        capsys, "plan", "--scenario", FIXED, "--costs", fname, "--format", "json"
    )
    assert code == EXIT_OK
    plan = json.loads(out)
    assert plan["total_cost"] == 54
    assert plan["steps"][1]["agent"] == "robot"


def test_plan_invalid_costs(capsys, tmp_path):
    fname = os.path.join(tmp_path, "costs.json")
    with open(fname, "w", encoding="utf-8") as f:
        json.dump({"costs": [{"action": "a9", "agent": "human", "cost": 1}]}, f)
    code, _, _ = run(capsys, "plan", "--scenario", FIXED, "--costs", fname)
    assert code == EXIT_INVALID


def test_plan_over_pruned(capsys, tmp_path, fixed_data):
    fixed_data["prune"] = [["a3", "human"], ["a3", "robot"]]
    scenario = write_scenario(tmp_path, fixed_data)
    code, _, err = run(capsys, "plan", "--scenario", scenario)
    assert code == EXIT_INVALID
    assert err.startswith("error: no feasible plan: ")


def test_plan_malformed_scenario(capsys, tmp_path):
    fname = os.path.join(tmp_path, "bad.json")
    with open(fname, "w", encoding="utf-8") as f:
        f.write("{")
    code, _, err = run(capsys, "plan", "--scenario", fname)
    assert code == EXIT_INVALID
    assert fname in err


def test_simulate_without_profile(capsys, tmp_path):
    code, _, err = run(capsys, "simulate", "--scenario", FIXED, "--out", tmp_path)
    assert code == EXIT_MISSING
    assert "calibrate" in err

    missing = os.path.join(tmp_path, "profile.json")
    code, _, _ = run(
        capsys, "simulate", "--scenario", FIXED, "--profile", missing, "--out", tmp_path
    )
    assert code == EXIT_MISSING


def test_simulate_zero_repetitions(capsys, tmp_path):
    code, _, _ = run(
        capsys,
        "simulate",
        "--scenario",
        FIXED,
        "--repetitions",
        0,
        "--calibrate-first",
        "--out",
        tmp_path,
    )
    assert code == EXIT_OK
    lines = read(os.path.join(tmp_path, "trace.csv")).splitlines()
    assert len(lines) == 2
    summary = json.loads(read(os.path.join(tmp_path, "summary.json")))
    assert summary["repetitions"] == 0
    assert summary["baseline"]["g_th"] == pytest.approx(7.2)


def test_simulate_writes_outputs(capsys, tmp_path):
    profile = os.path.join(tmp_path, "profile.json")
    code, _, _ = run(capsys, "calibrate", "--scenario", FIXED, "--out", profile)
    assert code == EXIT_OK

    outs = []
    for i in range(2):
        out = os.path.join(tmp_path, f"run{i}")
        code, stdout, _ = run(
            capsys,
            "simulate",
            "--scenario",
            FIXED,
            "--profile",
            profile,
            "--repetitions",
            4,
            "--out",
            out,
        )
        assert code == EXIT_OK
        assert stdout.startswith("20 action(s) over 4 repetition(s)")
        outs.append(out)

    trace = read(os.path.join(outs[0], "trace.csv"))
    assert trace == read(os.path.join(outs[1], "trace.csv"))

    df = pd.read_csv(os.path.join(outs[0], "trace.csv"), comment="#")
    assert len(df) == 20
    assert df.loc[df["repetition"] == 1, "agent"].tolist()[-1] == "robot"

    timing = pd.read_csv(os.path.join(outs[0], "timing.csv"), comment="#")
    assert list(timing.columns)[-1] == "search_time"

    kwear = pd.read_csv(os.path.join(outs[0], "kwear.csv"), comment="#")
    assert list(kwear.columns) == ["t_seconds", *JOINTS]
    assert kwear["t_seconds"].iloc[-1] == pytest.approx(df["time"].iloc[-1])

    summary = json.loads(read(os.path.join(outs[0], "summary.json")))
    assert summary["repetitions"] == 4
    assert summary["robot_percent"] > 0
    assert set(summary["baseline"]["allocation"].values()) == {"human"}


def test_simulate_seed_keeps_scores(capsys, tmp_path):
    outs = []
    for seed in [1, 2]:
        out = os.path.join(tmp_path, f"seed{seed}")
        code, _, _ = run(
            capsys,
            "simulate",
            "--scenario",
            FIXED,
            "--repetitions",
            1,
            "--calibrate-first",
            "--seed",
            seed,
            "--out",
            out,
        )
        assert code == EXIT_OK
        outs.append(read(os.path.join(out, "kwear.csv")))
    # same scores, same wear: jitter only moves postures inside the bands
    assert outs[0] == outs[1]


def test_calibrate(capsys, tmp_path):
    fname = os.path.join(tmp_path, "sub", "profile.json")
    code, out, _ = run(capsys, "calibrate", "--scenario", FIXED, "--out", fname)
    assert code == EXIT_OK
    assert len(out.splitlines()) == 5
    profile = json.loads(read(fname))
    assert sorted(profile["actions"]) == ["a1", "a2", "a3", "a4", "a5"]


def test_calibrate_insufficient(capsys, tmp_path):
    fname = os.path.join(tmp_path, "profile.json")
    code, _, err = run(
        capsys, "calibrate", "--scenario", FIXED, "--eta0", 5, "--out", fname
    )
    assert code == EXIT_MISSING
    assert "a1" in err
    assert not os.path.exists(fname)


def test_calibrate_not_converged(capsys, tmp_path):
    for i, score in enumerate([1, 6]):
        n = 101
        traj = Trajectory(0.05 * np.arange(n), np.full((n, len(JOINTS)), score))
        traj.to_csv(os.path.join(tmp_path, f"ex{i}.csv"))

    data = chain_data([{"dominant": "neck", "band": 3, "duration": 5}])
    data["actions"][0]["trajectories"] = ["ex0.csv", "ex1.csv"]
    scenario = write_scenario(tmp_path, data)

    fname = os.path.join(tmp_path, "profile.json")
    code, out, err = run(
        capsys, "calibrate", "--scenario", scenario, "--eta0", 2, "--out", fname
    )
    assert code == EXIT_NOT_CONVERGED
    assert "NOT CONVERGED" in out
    assert "a1" in err
    assert json.loads(read(fname))["actions"]["a1"]["converged"] is False


def test_missing_trajectory_file(capsys, tmp_path):
    data = chain_data([{"dominant": "neck", "band": 3, "duration": 5}])
    data["actions"][0]["trajectories"] = ["ex0.csv", "ex1.csv", "ex2.csv"]
    scenario = write_scenario(tmp_path, data)
    code, _, _ = run(capsys, "calibrate", "--scenario", scenario)
    assert code == EXIT_MISSING


def test_bench(capsys, tmp_path):
    code, out, _ = run(
        capsys,
        "bench",
        "--family",
        "scarce",
        "--pieces",
        2,
        8,
        "--agents",
        1,
        6,
        "--agents-pieces",
        6,
        "--seeds",
        1,
        "--out",
        tmp_path,
        "--format",
        "json",
    )
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["scarce_pieces"]["concave"] is True
    assert report["scarce_agents"]["generated"]["r2"] == pytest.approx(1.0)

    lines = read(os.path.join(tmp_path, "bench.csv")).splitlines()
    assert lines[0] == "# schema: 1"
    assert len(lines) == 2 + 7 + 6
    trends = json.loads(read(os.path.join(tmp_path, "trends.json")))
    assert trends["scarce_pieces"] == report["scarce_pieces"]


def test_bench_invalid_range(capsys, tmp_path):
    code, _, err = run(capsys, "bench", "--pieces", 5, 3, "--out", tmp_path)
    assert code == EXIT_INVALID
    assert "range" in err
