"""Computational complexity of the search on generated assemblies.

Notes
-----
Two sweeps are run, as many pieces as `pieces` with a fixed count of
agents, and as many agents as `agents` with `agents_pieces` pieces.
Every point searches a fresh graph from the complete assembly down to
all pieces separated, with costs drawn uniformly from (0, 100) under a
seed fixed per point. Wall times are hardware specific and only
reported, trends are fitted on expansion and generation counts.
"""

import logging
import math
import multiprocessing
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Literal, Tuple

import numpy as np
import numpy.typing as npt
import pandas as pd
from scipy import stats

from ergoalloc.core.errors import SearchTimeoutError
from ergoalloc.core.generators import build_scarce, build_sequential
from ergoalloc.core.graph import AndOrGraph
from ergoalloc.search.aostar import ao_star
from ergoalloc.utils import Stopwatch, write_csv

__all__ = [
    "BENCH_SCHEMA",
    "Family",
    "BenchConfig",
    "BenchPoint",
    "bench_point",
    "run_bench",
    "FitResult",
    "exponential_fit",
    "linear_fit",
    "compare_growth",
    "trend_report",
    "write_bench_csv",
]

BENCH_SCHEMA = 1

Family = Literal["sequential", "scarce"]
Sweep = Literal["pieces", "agents"]


@dataclass(frozen=True)
class BenchConfig:
    """Bench sweep settings.

    Attributes
    ----------
    family : `sequential` | `scarce` | `both`
    pieces : (int, int)
        Inclusive range of the piece sweep.
    agents : (int, int)
        Inclusive range of the agent sweep.
    sweep_agents : int
        Agents during the piece sweep.
    agents_pieces : int
        Pieces during the agent sweep.
    seeds : int
        Random cost draws per point, the median is reported.
    time_budget : float
        Seconds allowed per search, the point is marked timed out beyond.
    jobs : int
        Worker processes, points run in a pool if more than 1.
    sweeps : tuple of str
        Sweeps to run, `pieces` and/or `agents`.
    """

    family: Literal["sequential", "scarce", "both"] = "both"
    pieces: Tuple[int, int] = (2, 20)
    agents: Tuple[int, int] = (2, 30)
    sweep_agents: int = 2
    agents_pieces: int = 10
    seeds: int = 3
    time_budget: float = 30.0
    seed: int = 0
    cost_low: float = 0.0
    cost_high: float = 100.0
    jobs: int = 1
    sweeps: Tuple[Sweep, ...] = ("pieces", "agents")

    def __post_init__(self) -> None:
        for name in ["pieces", "agents"]:
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"empty {name} range: {lo}..{hi}")
        if self.pieces[0] < 2:
            raise ValueError("at least 2 pieces are required")
        if self.agents[0] < 1 or self.sweep_agents < 1:
            raise ValueError("at least 1 agent is required")
        if self.seeds < 1:
            raise ValueError("at least 1 seed is required")
        if not self.time_budget > 0:
            raise ValueError("time budget must be positive")
        if not 0 <= self.cost_low < self.cost_high:
            raise ValueError(f"invalid cost range ({self.cost_low}, {self.cost_high})")
        if unknown := set(self.sweeps) - {"pieces", "agents"}:
            raise ValueError(f"unknown sweep(s): {sorted(unknown)}")

    def families(self) -> List[Family]:
        return ["sequential", "scarce"] if self.family == "both" else [self.family]

    def points(self) -> List[Tuple[Sweep, Family, int, int]]:
        out: List[Tuple[Sweep, Family, int, int]] = []
        for family in self.families():
            if "pieces" in self.sweeps:
                for m in range(self.pieces[0], self.pieces[1] + 1):
                    out.append(("pieces", family, m, self.sweep_agents))
            if "agents" in self.sweeps:
                for k in range(self.agents[0], self.agents[1] + 1):
                    out.append(("agents", family, self.agents_pieces, k))
        return out


@dataclass(frozen=True)
class BenchPoint:
    sweep: str
    family: str
    pieces: int
    agents: int
    nodes: int
    arcs: int
    expanded: float
    generated: float
    wall_time: float
    timed_out: bool


def build_family(family: Family, pieces: int, agents: int) -> AndOrGraph:
    match family:
        case "sequential":
            return build_sequential(pieces, agents)
        case "scarce":
            return build_scarce(pieces, agents)
        case _:
            raise ValueError(f"unknown assembly family `{family}`")


def bench_point(
    sweep: Sweep, family: Family, pieces: int, agents: int, cfg: BenchConfig
) -> BenchPoint:
    """Median search counters and wall time over the seeds of a point.

    All seeds of a point share one time budget. Running out of it marks
    the point timed out and leaves its counters NaN.
    """
    graph = build_family(family, pieces, agents)
    expanded, generated, wall = [], [], []
    try:
        with Stopwatch(cfg.time_budget) as budget:
            for s in range(cfg.seeds):
                key = (cfg.seed, _family_id(family), pieces, agents, s)
                rng = np.random.default_rng(key)
                costs = rng.uniform(
                    cfg.cost_low, cfg.cost_high, size=graph.number_of_arcs()
                )
                with Stopwatch() as sw:
                    plan = ao_star(graph, costs=costs, deadline=budget.deadline)

                expanded.append(plan.stats.expanded)
                generated.append(plan.stats.generated)
                wall.append(sw.elapsed)
    except SearchTimeoutError:
        logging.warning(
            "bench: %s %s, %d pieces, %d agents timed out after %.1fs",
            sweep,
            family,
            pieces,
            agents,
            cfg.time_budget,
        )
        return BenchPoint(
            sweep=sweep,
            family=family,
            pieces=pieces,
            agents=agents,
            nodes=graph.number_of_nodes(),
            arcs=graph.number_of_arcs(),
            expanded=math.nan,
            generated=math.nan,
            wall_time=math.nan,
            timed_out=True,
        )

    return BenchPoint(
        sweep=sweep,
        family=family,
        pieces=pieces,
        agents=agents,
        nodes=graph.number_of_nodes(),
        arcs=graph.number_of_arcs(),
        expanded=float(np.median(expanded)),
        generated=float(np.median(generated)),
        wall_time=float(np.median(wall)),
        timed_out=False,
    )


def _bench_task(args: Tuple[Sweep, Family, int, int, BenchConfig]) -> BenchPoint:
    return bench_point(*args)


def run_bench(cfg: BenchConfig, *, verbose: bool = False) -> pd.DataFrame:
    """Run both sweeps, one row per point.

    Parameters
    ----------
    cfg : BenchConfig
    verbose : bool, default `False`
        Show a progress bar.
    """
    tasks = [(*p, cfg) for p in cfg.points()]
    if cfg.jobs > 1:
        with multiprocessing.Pool(cfg.jobs) as p:
            points = p.map(_bench_task, tasks)
    else:
        from tqdm import tqdm

        points = [_bench_task(t) for t in (tqdm(tasks) if verbose else tasks)]

    for pt in points:
        logging.debug("bench point: %s", pt)

    columns = list(BenchPoint.__dataclass_fields__.keys())
    return pd.DataFrame([asdict(pt) for pt in points], columns=columns)


def write_bench_csv(df: pd.DataFrame, fname: str) -> None:
    write_csv(df, fname, schema=BENCH_SCHEMA, float_format="%.6g")


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r2: float
    sse: float

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def exponential_fit(x: npt.ArrayLike, y: npt.ArrayLike) -> FitResult:
    """Fit `y = exp(intercept + slope·x)` by regression of `log(y)`.

    The R² is the one of the log-linear regression, the SSE is measured
    on `y`.
    """
    x, y = _finite_xy(x, y)
    if np.any(y <= 0):
        raise ValueError("exponential fit needs positive values")

    res = stats.linregress(x, np.log(y))
    pred = np.exp(res.intercept + res.slope * x)
    return FitResult(res.slope, res.intercept, res.rvalue**2, _sse(y, pred))


def linear_fit(x: npt.ArrayLike, y: npt.ArrayLike) -> FitResult:
    x, y = _finite_xy(x, y)
    res = stats.linregress(x, y)
    pred = res.intercept + res.slope * x
    return FitResult(res.slope, res.intercept, res.rvalue**2, _sse(y, pred))


def compare_growth(x: npt.ArrayLike, y: npt.ArrayLike) -> Dict[str, Any]:
    """Whether `c1·x·log(x) + c0` fits `y` better than an exponential.

    Returns
    -------
    report : dict
        Both fits, the better model and whether `log(y)` is concave in
        `x`, i.e. grows slower than any exponential.
    """
    x, y = _finite_xy(x, y)
    exp_fit = exponential_fit(x, y)
    mlogm = linear_fit(x * np.log(x), y)

    log_y = np.log(y)
    slopes = np.diff(log_y) / np.diff(x)
    concave = bool(np.all(np.diff(slopes) <= 1e-12))
    return {
        "exponential": exp_fit.as_dict(),
        "mlogm": mlogm.as_dict(),
        "better": "mlogm" if mlogm.sse < exp_fit.sse else "exponential",
        "concave": concave,
    }


def trend_report(df: pd.DataFrame) -> Dict[str, Any]:
    """Trend fits of every sweep found in a bench table.

    Piece sweeps are fitted on expansions, exponential for the
    sequential family and compared against M·log M for the scarce one.
    Agent sweeps are fitted linearly on generated states.
    """
    report: Dict[str, Any] = {"schema": BENCH_SCHEMA}
    for (sweep, family), grp in df[~df["timed_out"]].groupby(["sweep", "family"]):
        grp = grp.sort_values("agents" if sweep == "agents" else "pieces")
        key = f"{family}_{sweep}"
        if len(grp) < 3:
            logging.warning("trend: too few points in `%s`", key)
            continue

        if sweep == "pieces":
            x, y = grp["pieces"].to_numpy(float), grp["expanded"].to_numpy(float)
            if family == "sequential":
                report[key] = {"exponential": exponential_fit(x, y).as_dict()}
            else:
                report[key] = compare_growth(x, y)
        else:
            x = grp["agents"].to_numpy(float)
            report[key] = {
                "generated": linear_fit(x, grp["generated"].to_numpy(float)).as_dict(),
                "wall_time": linear_fit(x, grp["wall_time"].to_numpy(float)).as_dict(),
            }
    return report


def _finite_xy(
    x: npt.ArrayLike, y: npt.ArrayLike
) -> Tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    x, y = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    ok = np.isfinite(x) & np.isfinite(y)
    if np.count_nonzero(ok) < 2:
        raise ValueError("at least 2 finite points are required to fit")
    return x[ok], y[ok]


def _sse(y: npt.NDArray[np.float64], pred: npt.NDArray[np.float64]) -> float:
    return float(np.sum((y - pred) ** 2))


def _family_id(family: Family) -> int:
    return ["sequential", "scarce"].index(family)

