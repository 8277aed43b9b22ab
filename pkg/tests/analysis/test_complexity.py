import dataclasses
import logging
import math
import os

import numpy as np
import pandas as pd
import pytest

from ergoalloc.analysis import (
    BenchConfig,
    bench_point,
    compare_growth,
    complexity,
    exponential_fit,
    linear_fit,
    run_bench,
    trend_report,
    write_bench_csv,
)
from ergoalloc.core import SearchTimeoutError
from ergoalloc.search import ao_star


def test_exponential_fit():
    x = np.arange(2, 12, dtype=np.float64)
    fit = exponential_fit(x, 3 * np.exp(0.7 * x))
    assert fit.slope == pytest.approx(0.7)
    assert fit.intercept == pytest.approx(math.log(3))
    assert fit.r2 == pytest.approx(1.0)
    assert fit.sse == pytest.approx(0.0, abs=1e-12)


def test_exponential_fit_invalid():
    with pytest.raises(ValueError):
        exponential_fit([1, 2, 3], [1, 0, 2])
    with pytest.raises(ValueError):
        exponential_fit([1, 2], [1, math.nan])


def test_linear_fit_skips_missing_points():
    x = [1, 2, 3, 4, 5]
    y = [3, 5, math.nan, 9, 11]
    fit = linear_fit(x, y)
    assert fit.slope == pytest.approx(2.0)
    assert fit.intercept == pytest.approx(1.0)
    assert fit.as_dict()["r2"] == pytest.approx(1.0)


def test_compare_growth():
    x = np.arange(2, 21, dtype=np.float64)
    report = compare_growth(x, x - 1)
    assert report["concave"] is True
    assert report["better"] == "mlogm"
    assert report["mlogm"]["r2"] > 0.95

    report = compare_growth(x, np.exp(0.1 * x**2))
    assert report["concave"] is False


@pytest.mark.parametrize(
    "kwargs",
    [
        {"pieces": (5, 3)},
        {"pieces": (1, 3)},
        {"agents": (0, 2)},
        {"sweep_agents": 0},
        {"seeds": 0},
        {"time_budget": 0},
        {"cost_low": 10, "cost_high": 5},
        {"sweeps": ("pieces", "depth")},
    ],
)
def test_bench_config_invalid(kwargs):
    with pytest.raises(ValueError):
        BenchConfig(**kwargs)


def test_bench_config_points():
    cfg = BenchConfig(pieces=(2, 5), agents=(1, 3))
    points = cfg.points()
    assert len(points) == 2 * (4 + 3)
    assert points[0] == ("pieces", "sequential", 2, 2)
    assert points[4] == ("agents", "sequential", 10, 1)

    cfg = BenchConfig(family="scarce", agents=(1, 3), sweeps=("agents",))
    assert cfg.points() == [("agents", "scarce", 10, k) for k in [1, 2, 3]]


def test_bench_point_scarce():
    cfg = BenchConfig(seeds=3)
    pt = bench_point("pieces", "scarce", 6, 2, cfg)
    assert (pt.nodes, pt.arcs) == (11, 10)
    assert pt.expanded == 5
    assert pt.generated == 1 + 2 * 5
    assert pt.timed_out is False
    assert pt.wall_time >= 0


def test_bench_point_sequential_unit_agents():
    pt = bench_point("pieces", "sequential", 5, 1, BenchConfig(seeds=1))
    assert (pt.nodes, pt.arcs) == (15, 20)
    assert 0 < pt.expanded <= 2**4 - 1


def test_bench_point_timeout(caplog):
    cfg = BenchConfig(time_budget=1e-9, seeds=1)
    with caplog.at_level(logging.WARNING):
        pt = bench_point("pieces", "sequential", 12, 2, cfg)
    assert pt.timed_out is True
    assert math.isnan(pt.expanded) and math.isnan(pt.wall_time)
    assert pt.nodes == 78
    assert "timed out" in caplog.text


def test_bench_point_seeds_share_budget(monkeypatch):
    deadlines = []

    def recording_ao_star(graph, **kwargs):
        deadlines.append(kwargs["deadline"])
        return ao_star(graph, **kwargs)

    monkeypatch.setattr(complexity, "ao_star", recording_ao_star)
    pt = bench_point("pieces", "scarce", 6, 2, BenchConfig(seeds=3, time_budget=60))
    assert pt.timed_out is False
    assert len(deadlines) == 3
    assert deadlines[0] is not None
    assert len(set(deadlines)) == 1


def test_bench_point_late_seed_times_out(monkeypatch):
    calls = []

    def slow_third_seed(graph, **kwargs):
        calls.append(kwargs["deadline"])
        if len(calls) == 3:
            raise SearchTimeoutError("search ran out of time")
        return ao_star(graph, **kwargs)

    monkeypatch.setattr(complexity, "ao_star", slow_third_seed)
    pt = bench_point("pieces", "scarce", 6, 2, BenchConfig(seeds=3))
    assert pt.timed_out is True
    assert math.isnan(pt.generated)
    assert len(calls) == 3


def test_bench_point_unknown_family():
    with pytest.raises(ValueError):
        bench_point("pieces", "dense", 4, 2, BenchConfig())  # type: ignore


def test_run_bench_parallel_matches_serial():
    cfg = BenchConfig(pieces=(2, 6), agents=(1, 3), agents_pieces=5, seeds=2)
    serial = run_bench(cfg)
    parallel = run_bench(dataclasses.replace(cfg, jobs=2))
    assert len(serial) == 2 * (5 + 3)
    pd.testing.assert_frame_equal(
        serial.drop(columns=["wall_time"]), parallel.drop(columns=["wall_time"])
    )


def test_trend_report():
    cfg = BenchConfig(pieces=(2, 7), agents=(1, 4), agents_pieces=5, seeds=1)
    report = trend_report(run_bench(cfg))
    assert report["schema"] == 1
    assert set(report) == {
        "schema",
        "sequential_pieces",
        "sequential_agents",
        "scarce_pieces",
        "scarce_agents",
    }
    assert report["sequential_pieces"]["exponential"]["slope"] > 0
    assert report["scarce_pieces"]["concave"] is True
    assert report["scarce_agents"]["generated"]["slope"] == pytest.approx(4.0)


def test_trend_report_skips_short_sweeps(caplog):
    cfg = BenchConfig(family="scarce", pieces=(2, 3), sweeps=("pieces",), seeds=1)
    with caplog.at_level(logging.WARNING):
        report = trend_report(run_bench(cfg))
    assert report == {"schema": 1}
    assert "scarce_pieces" in caplog.text


def test_write_bench_csv(tmp_path):
    cfg = BenchConfig(family="scarce", pieces=(2, 4), sweeps=("pieces",), seeds=1)
    df = run_bench(cfg)
    fname = os.path.join(tmp_path, "bench.csv")
    write_bench_csv(df, fname)

    with open(fname, encoding="utf-8") as f:
        assert f.readline() == "# schema: 1\n"
    back = pd.read_csv(fname, comment="#")
    assert list(back.columns) == list(df.columns)
    assert back["expanded"].tolist() == [1, 2, 3]


def test_sequential_growth_is_exponential():
    cfg = BenchConfig(family="sequential", pieces=(2, 10), sweeps=("pieces",))
    report = trend_report(run_bench(cfg))
    fit = report["sequential_pieces"]["exponential"]
    assert fit["r2"] >= 0.9
    assert fit["slope"] > 0


def test_sequential_agents_growth_is_linear():
    cfg = BenchConfig(
        family="sequential",
        sweeps=("agents",),
        agents_pieces=10,
        agents=(1, 10),
        seeds=1,
    )
    df = run_bench(cfg)
    assert set(df["pieces"]) == {10}
    assert not df["timed_out"].any()
    fit = trend_report(df)["sequential_agents"]["generated"]
    assert fit["r2"] >= 0.9
    assert fit["slope"] > 0


def test_scarce_growth_is_sub_exponential():
    cfg = BenchConfig(family="scarce", pieces=(2, 20), agents=(1, 10), seeds=1)
    report = trend_report(run_bench(cfg))
    assert report["scarce_pieces"]["concave"] is True
    assert report["scarce_agents"]["generated"]["r2"] >= 0.9
