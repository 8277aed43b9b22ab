"""Synthetic joint trajectories.

Stands in for motion capture: a template names the joints loaded by an
action and their RULA band, and every sample holds those joints inside
that band while the others rest in a low band.
"""

from typing import List, Optional

import numpy as np

from ergoalloc.kwear.rula import AXES, JOINTS, RulaTables, get_rula_tables
from ergoalloc.kwear.trajectory import Trajectory, TrajectoryTemplate
from ergoalloc.sim.clock import TICK

__all__ = ["synthesize_trajectory", "synthesize_executions"]

JITTER = 0.25  # of the band half-width


def synthesize_trajectory(
    template: TrajectoryTemplate,
    *,
    seed: int = 0,
    stream: int = 0,
    variant: int = 0,
    tables: Optional[RulaTables] = None,
    tick: float = TICK,
) -> Trajectory:
    """Posture series of one execution, sampled every `tick` seconds.

    Each joint sits near the middle of its band with a seeded jitter
    that never leaves the band, so the RULA score of every sample is
    exactly the requested one.

    Parameters
    ----------
    template : TrajectoryTemplate
    seed : int, default `0`
    stream : int, default `0`
        Separates the noise of different actions under one seed.
    variant : int, default `0`
        Index of the execution, varies the jitter.
    tables : RulaTables, optional
    tick : float, default `0.05`

    Raises
    ------
    ValueError
        A requested band does not exist in the joint's table.
    """
    tables = tables or get_rula_tables()
    n = int(round(template.duration / tick))
    t = tick * np.arange(n + 1)

    rng = np.random.default_rng((seed, stream, variant))
    noise = rng.uniform(-JITTER, JITTER, size=(n + 1, len(JOINTS)))
    postures = np.zeros((n + 1, len(JOINTS), len(AXES)), dtype=np.float64)
    for i, joint in enumerate(JOINTS):
        band = template.band if joint in template.dominant else template.background
        table = tables[joint]
        lo, hi = table.band_interval(band)
        mid, half = (lo + hi) / 2, (hi - lo) / 2
        postures[:, i, table.axis_index] = mid + half * noise[:, i]

    source = f"synthetic:{'+'.join(template.dominant)}:{template.band}:{variant}"
    return Trajectory.from_postures(t, postures, tables, source=source)


def synthesize_executions(
    template: TrajectoryTemplate,
    *,
    seed: int = 0,
    stream: int = 0,
    tables: Optional[RulaTables] = None,
    tick: float = TICK,
) -> List[Trajectory]:
    return [
        synthesize_trajectory(
            template, seed=seed, stream=stream, variant=i, tables=tables, tick=tick
        )
        for i in range(template.executions)
    ]
