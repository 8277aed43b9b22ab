"""Per-joint RULA scoring of postures.

Notes
-----
Only the joint-level band lookup of RULA is implemented: a posture is
mapped to a score by the rotation about one axis. Muscle-use and
force/load adjustments and the grand-score tables are not used, the
framework only consumes the per-joint score G_i(q) in [1, 6].

References
----------
[1] McAtamney, L. & Corlett, E. N. RULA: a survey method for the
investigation of work-related upper limb disorders. Applied
Ergonomics 24, 91-99 (1993).
"""

from dataclasses import dataclass
from typing import Dict, Literal, Mapping, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

__all__ = [
    "Joint",
    "JOINTS",
    "AXES",
    "SCORE_MIN",
    "SCORE_MAX",
    "RulaTable",
    "RulaTables",
    "DEFAULT_RULA_TABLES",
    "get_rula_tables",
    "joint_index",
    "rula_score",
    "score_postures",
]

Joint = Literal["shoulder", "elbow", "wrist", "trunk", "neck"]
JOINTS: Tuple[Joint, ...] = ("shoulder", "elbow", "wrist", "trunk", "neck")
AXES = ("x", "y", "z")

SCORE_MIN, SCORE_MAX = 1, 6


@dataclass(frozen=True)
class RulaTable:
    """Piecewise-constant score bands of one joint.

    A posture angle `a` about `axis` falls in band `k` when
    `edges[k-1] < a <= edges[k]`, and scores `scores[k]`. Angles below
    the first edge or above the last one take the outer scores, so
    out-of-range postures never fail.
    """

    axis: Literal["x", "y", "z"]
    edges: Tuple[float, ...]
    scores: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.axis not in AXES:
            raise ValueError(f"unknown axis `{self.axis}`")
        if len(self.scores) != len(self.edges) + 1:
            raise ValueError("a RULA table needs one more score than edges")
        if any(b <= a for a, b in zip(self.edges, self.edges[1:])):
            raise ValueError("RULA band edges must be strictly increasing")
        if any(not SCORE_MIN <= s <= SCORE_MAX for s in self.scores):
            raise ValueError(f"RULA scores must be in [{SCORE_MIN}, {SCORE_MAX}]")

    @property
    def axis_index(self) -> int:
        return AXES.index(self.axis)

    def score(self, angles: npt.ArrayLike) -> npt.NDArray[np.int32]:
        angles = np.asarray(angles, dtype=np.float64)
        band = np.digitize(angles, self.edges, right=True)
        scores = np.asarray(self.scores, dtype=np.int32)[band]
        return np.clip(scores, SCORE_MIN, SCORE_MAX)

    def max_score(self) -> int:
        return max(self.scores)

    def band_interval(self, score: int, *, span: float = 30.0) -> Tuple[float, float]:
        """Angle interval `(lo, hi]` of a score.

        When several intervals share the score, the one with the largest
        angles is returned. Open-ended intervals are closed `span`
        degrees away from their finite edge.
        """
        candidates = [k for k, s in enumerate(self.scores) if s == score]
        if len(candidates) == 0:
            raise ValueError(f"no band with score {score} on axis `{self.axis}`")

        k = candidates[-1]
        lo = self.edges[k - 1] if k > 0 else self.edges[0] - span
        hi = self.edges[k] if k < len(self.edges) else self.edges[-1] + span
        return lo, hi

    @classmethod
    def from_dict(cls, d: Mapping) -> "RulaTable":
        return cls(
            axis=d.get("axis", "y"),
            edges=tuple(float(e) for e in d["edges"]),
            scores=tuple(int(s) for s in d["scores"]),
        )


RulaTables = Dict[Joint, RulaTable]

# fmt: off
DEFAULT_RULA_TABLES: RulaTables = {
    # flexion: extension > 20 -> 2, +-20 -> 1, 20-45 -> 2, 45-90 -> 3, > 90 -> 4
    "shoulder": RulaTable("y", (-20.0, 20.0, 45.0, 90.0), (2, 1, 2, 3, 4)),
    # flexion: 60-100 -> 1, else 2
    "elbow":    RulaTable("y", (60.0, 100.0), (2, 1, 2)),
    # flexion/extension: neutral -> 1, 0-15 -> 2, > 15 -> 3
    "wrist":    RulaTable("y", (-15.0, -5.0, 5.0, 15.0), (3, 2, 1, 2, 3)),
    # flexion: upright -> 1, 0-20 -> 2, 20-60 -> 3, > 60 -> 4, extension -> 2
    "trunk":    RulaTable("y", (-5.0, 5.0, 20.0, 60.0), (2, 1, 2, 3, 4)),
    # flexion: 0-10 -> 1, 10-20 -> 2, > 20 -> 3, extension -> 4
    "neck":     RulaTable("y", (0.0, 10.0, 20.0), (4, 1, 2, 3)),
}
# fmt: on


def get_rula_tables(overrides: Optional[Mapping[str, RulaTable]] = None) -> RulaTables:
    tables = dict(DEFAULT_RULA_TABLES)
    for joint, table in (overrides or {}).items():
        if joint not in JOINTS:
            raise ValueError(f"unknown joint `{joint}`")
        tables[joint] = table  # type: ignore
    return tables


def joint_index(joint: str) -> int:
    try:
        return JOINTS.index(joint)  # type: ignore
    except ValueError as e:
        raise ValueError(f"unknown joint `{joint}`") from e


def rula_score(
    joint: Joint, posture: Sequence[float], tables: Optional[RulaTables] = None
) -> int:
    """RULA score of one joint posture.

    Parameters
    ----------
    joint : Joint
    posture : (qx, qy, qz)
        Rotation angles about the Cartesian axes, in degrees.
    tables : RulaTables, optional
        Defaults to `DEFAULT_RULA_TABLES`.
    """
    joint_index(joint)
    q = np.asarray(posture, dtype=np.float64)
    if q.shape != (3,):
        raise ValueError(f"a posture is a triple of angles, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise ValueError(f"non-finite posture: {posture}")

    table = (tables or DEFAULT_RULA_TABLES)[joint]
    return int(table.score(q[table.axis_index]))


def score_postures(
    postures: npt.NDArray[np.floating], tables: Optional[RulaTables] = None
) -> npt.NDArray[np.int32]:
    """Score a posture series.

    Parameters
    ----------
    postures : array of shape (N, 5, 3)
        Angles per sample, joint (in `JOINTS` order) and axis.

    Returns
    -------
    scores : array of shape (N, 5)
    """
    postures = np.asarray(postures, dtype=np.float64)
    assert postures.ndim == 3 and postures.shape[1:] == (len(JOINTS), 3)
    if not np.all(np.isfinite(postures)):
        raise ValueError("non-finite posture in series")

    tables = tables or DEFAULT_RULA_TABLES
    cols = [
        tables[j].score(postures[:, i, tables[j].axis_index])
        for i, j in enumerate(JOINTS)
    ]
    return np.stack(cols, axis=1).astype(np.int32)
