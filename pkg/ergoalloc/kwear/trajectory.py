"""Joint trajectories of one action execution.

A trajectory file is a comma-separated table with a header row. It holds
either raw postures, columns `t_seconds` and `<joint>_<axis>` for every
joint and axis in degrees, or pre-scored samples, columns `t_seconds` and
`<joint>_score`. Lines starting with `#` are comments.
"""

import os
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Literal, Optional, cast

import numpy as np
import numpy.typing as npt
import pandas as pd
from typing_extensions import Self

from ergoalloc.core.errors import TrajectoryError
from ergoalloc.kwear.rula import (
    AXES,
    JOINTS,
    SCORE_MAX,
    SCORE_MIN,
    Joint,
    RulaTables,
    score_postures,
)
from ergoalloc.utils import FileReader, PathOrIO, write_csv

__all__ = [
    "TIME_COL",
    "posture_cols",
    "score_cols",
    "Trajectory",
    "TrajectoryTemplate",
    "LazyTrajectories",
]

TIME_COL = "t_seconds"


def posture_cols() -> List[str]:
    return [f"{j}_{a}" for j in JOINTS for a in AXES]


def score_cols() -> List[str]:
    return [f"{j}_score" for j in JOINTS]


class Trajectory:
    """Sampled RULA scores, and optionally postures, of one execution.

    Attributes
    ----------
    t : array of shape (N,)
        Sample times in seconds, non-decreasing.
    scores : array of int32, shape (N, m)
        RULA score per sample and joint, in `JOINTS` order.
    postures : array of shape (N, m, 3), optional
        Angles in degrees, absent for pre-scored data.
    """

    t: npt.NDArray[np.float64]
    scores: npt.NDArray[np.int32]
    postures: Optional[npt.NDArray[np.float64]]
    source: str

    def __init__(
        self,
        t: npt.ArrayLike,
        scores: npt.ArrayLike,
        postures: Optional[npt.ArrayLike] = None,
        *,
        source: str = "",
    ) -> None:
        self.source = source
        self.t = np.asarray(t, dtype=np.float64).reshape(-1)
        self.scores = np.asarray(scores, dtype=np.int32)
        if len(self.t) == 0:
            # numpy cannot infer a free axis from a size-0 array
            self.scores = np.zeros((0, len(JOINTS)), dtype=np.int32)
        else:
            self.scores = self.scores.reshape(len(self.t), -1)
        self.postures = (
            None if postures is None else np.asarray(postures, dtype=np.float64)
        )

        if not np.all(np.isfinite(self.t)):
            raise TrajectoryError(f"non-finite timestamps in `{source}`")
        if np.any(np.diff(self.t) < 0):
            raise TrajectoryError(f"unordered timestamps in `{source}`")
        if self.scores.shape[1] != len(JOINTS):
            raise TrajectoryError(
                f"expected scores of {len(JOINTS)} joints, got {self.scores.shape[1]}"
            )
        if np.any(self.scores < SCORE_MIN) or np.any(self.scores > SCORE_MAX):
            raise TrajectoryError(f"RULA scores out of [1, 6] in `{source}`")

    def __len__(self) -> int:
        return self.t.shape[0]

    def __repr__(self) -> str:
        return f"Trajectory with {len(self)} samples over {self.duration():.2f}s"

    def duration(self) -> float:
        return float(self.t[-1] - self.t[0]) if len(self) > 0 else 0.0

    def joint_scores(self, joint: Joint) -> npt.NDArray[np.int32]:
        return self.scores[:, JOINTS.index(joint)]

    def score_integral(self) -> npt.NDArray[np.float64]:
        """Left Riemann sum of the scores over time, per joint."""
        if len(self) < 2:
            return np.zeros(len(JOINTS), dtype=np.float64)

        dt = np.diff(self.t)
        return np.sum(self.scores[:-1] * dt[:, None], axis=0, dtype=np.float64)

    @classmethod
    def empty(cls) -> Self:
        return cls(np.zeros(0), np.zeros((0, len(JOINTS)), dtype=np.int32))

    @classmethod
    def from_postures(
        cls,
        t: npt.ArrayLike,
        postures: npt.ArrayLike,
        tables: Optional[RulaTables] = None,
        *,
        source: str = "",
    ) -> Self:
        postures = np.asarray(postures, dtype=np.float64)
        return cls(t, score_postures(postures, tables), postures, source=source)

    @classmethod
    def from_data_frame(
        cls,
        df: pd.DataFrame,
        tables: Optional[RulaTables] = None,
        *,
        source: str = "",
    ) -> Self:
        """Read trajectory from data frame.

        Posture columns win over score columns when both are present.
        """
        if TIME_COL not in df.columns:
            raise TrajectoryError(f"missing column `{TIME_COL}` in `{source}`")

        t = df[TIME_COL].to_numpy(dtype=np.float64)
        if all(c in df.columns for c in posture_cols()):
            angles = df[posture_cols()].to_numpy(dtype=np.float64)
            postures = angles.reshape(len(t), len(JOINTS), len(AXES))
            return cls.from_postures(t, postures, tables, source=source)

        if all(c in df.columns for c in score_cols()):
            return cls(t, df[score_cols()].to_numpy(), source=source)

        raise TrajectoryError(
            f"neither posture nor score columns found in `{source}`"
        )

    @classmethod
    def from_csv(
        cls,
        fname: PathOrIO,
        tables: Optional[RulaTables] = None,
        *,
        encoding: Literal["detect"] | str = "utf-8",
    ) -> Self:
        """Read trajectory from csv file.

        See Also
        --------
        Trajectory.from_data_frame
        """
        source = os.path.abspath(fname) if isinstance(fname, str) else ""
        try:
            with FileReader(fname, encoding=encoding) as f:
                df = pd.read_csv(f, comment="#", skipinitialspace=True)
        except TrajectoryError:
            raise
        except Exception as e:  # pylint: disable=broad-except
            raise TrajectoryError(f"fails to read trajectory: {fname}") from e

        return cls.from_data_frame(df, tables, source=source)

    def to_data_frame(self, *, scores_only: bool = False) -> pd.DataFrame:
        data: Dict[str, Any] = {TIME_COL: self.t}
        if self.postures is not None and not scores_only:
            flat = self.postures.reshape(len(self), -1)
            data.update(zip(posture_cols(), flat.T))
        else:
            data.update(zip(score_cols(), self.scores.T))
        return pd.DataFrame(data)

    def to_csv(self, fname: str, *, scores_only: bool = False) -> None:
        df = self.to_data_frame(scores_only=scores_only)
        write_csv(df, fname, float_format="%.4f")


@dataclass(frozen=True)
class TrajectoryTemplate:
    """Recipe of a synthetic execution.

    Attributes
    ----------
    dominant : Joint or list of Joint
        Joints held in the risky band.
    band : int
        RULA score of the dominant joints.
    duration : float
        Seconds.
    background : int, default `1`
        RULA score of every other joint, 1 or 2.
    executions : int, default `3`
        Number of recorded variants.
    """

    dominant: tuple[Joint, ...]
    band: int
    duration: float
    background: int = 1
    executions: int = 3

    def __post_init__(self) -> None:
        for j in self.dominant:
            if j not in JOINTS:
                raise ValueError(f"unknown joint `{j}`")
        if not SCORE_MIN <= self.band <= SCORE_MAX:
            raise ValueError(f"band must be in [1, 6], got {self.band}")
        if self.background not in (1, 2):
            raise ValueError(f"background band must be 1 or 2, got {self.background}")
        if not self.duration > 0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        if self.executions < 1:
            raise ValueError("at least one execution is required")

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> Self:
        dominant = d["dominant"]
        dominant = (dominant,) if isinstance(dominant, str) else tuple(dominant)
        return cls(
            dominant=cast(tuple[Joint, ...], dominant),
            band=int(d["band"]),
            duration=float(d["duration"]),
            background=int(d.get("background", 1)),
            executions=int(d.get("executions", 3)),
        )


class LazyTrajectories:
    """Recorded executions of one action, read from disk on first access.

    Parameters
    ----------
    files : Iterable of str
        One trajectory file per execution.
    tables : RulaTables, optional
        Scoring tables for files holding raw postures.
    """

    def __init__(
        self, files: Iterable[str], tables: Optional[RulaTables] = None
    ) -> None:
        self.files = list(files)
        self.tables = tables
        self.loaded: Dict[int, Trajectory] = {}

    def __len__(self) -> int:
        return len(self.files)

    def __getitem__(self, variant: int, /) -> Trajectory:
        if not -len(self) <= variant < len(self):
            raise IndexError(f"no execution {variant} among {len(self)}")

        variant %= len(self)
        if variant not in self.loaded:
            fname = self.files[variant]
            if not os.path.isfile(fname):
                raise TrajectoryError(f"missing trajectory file: {fname}")
            self.loaded[variant] = Trajectory.from_csv(fname, self.tables)
        return self.loaded[variant]
