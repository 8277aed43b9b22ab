"""Allocation trace of a simulated collaboration."""

from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterator, List, Tuple

import pandas as pd

from ergoalloc.kwear.rula import JOINTS
from ergoalloc.utils import write_csv, write_json

__all__ = [
    "TRACE_SCHEMA",
    "TraceRecord",
    "TaktRecord",
    "AllocationTrace",
]

TRACE_SCHEMA = 1


@dataclass(frozen=True)
class TraceRecord:
    """One executed action.

    Attributes
    ----------
    repetition, step : int
    action, agent, kind : str
    v_hat : tuple of float
        Wear per joint predicted at dispatch had the human done it.
    human_cost, robot_cost, cost : float
        Costs of the human arc, of the cheapest robot arc and of the
        chosen arc, NaN when there is no such arc.
    wear : tuple of float
        Wear per joint once the action is completed.
    elapsed, time : float
        Duration of the action and clock at its completion, seconds.
    expanded, generated : int
        Search counters.
    search_time : float
        Wall time of the search, kept out of the trace file.
    note : str
    """

    repetition: int
    step: int
    action: str
    agent: str
    kind: str
    v_hat: Tuple[float, ...]
    human_cost: float
    robot_cost: float
    cost: float
    wear: Tuple[float, ...]
    elapsed: float
    time: float
    expanded: int
    generated: int
    search_time: float = 0.0
    note: str = ""

    def row(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {
            "repetition": self.repetition,
            "step": self.step,
            "action": self.action,
            "agent": self.agent,
            "kind": self.kind,
        }
        row.update({f"v_hat_{j}": v for j, v in zip(JOINTS, self.v_hat)})
        row.update(
            human_cost=self.human_cost, robot_cost=self.robot_cost, cost=self.cost
        )
        row.update({f"wear_{j}": v for j, v in zip(JOINTS, self.wear)})
        row.update(
            elapsed=self.elapsed,
            time=self.time,
            expanded=self.expanded,
            generated=self.generated,
            note=self.note,
        )
        return row


@dataclass(frozen=True)
class TaktRecord:
    repetition: int
    elapsed: float
    pause: float
    violated: bool


class AllocationTrace:
    """Append-only log of executed actions, one record each."""

    def __init__(self) -> None:
        self._records: List[TraceRecord] = []
        self._takt: List[TaktRecord] = []

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[TraceRecord]:
        return iter(self._records)

    def __getitem__(self, idx: int) -> TraceRecord:
        return self._records[idx]

    def __repr__(self) -> str:
        return f"AllocationTrace with {len(self)} record(s)"

    def append(self, record: TraceRecord) -> None:
        self._records.append(record)

    def append_takt(self, record: TaktRecord) -> None:
        self._takt.append(record)

    @property
    def takt(self) -> List[TaktRecord]:
        return list(self._takt)

    def repetitions(self) -> int:
        return max((r.repetition for r in self._records), default=-1) + 1

    def repetition(self, idx: int) -> List[TraceRecord]:
        return [r for r in self._records if r.repetition == idx]

    def allocation(self, idx: int) -> Dict[str, str]:
        """Action label to agent name in one repetition."""
        return {r.action: r.agent for r in self.repetition(idx)}

    def to_data_frame(self, *, timing: bool = False) -> pd.DataFrame:
        rows = []
        for r in self._records:
            row = r.row()
            if timing:
                row["search_time"] = r.search_time
            rows.append(row)

        columns = list(_empty_row().keys()) + (["search_time"] if timing else [])
        return pd.DataFrame(rows, columns=columns)

    def to_csv(self, fname: str) -> None:
        """Write the trace, without wall times so reruns are identical."""
        write_csv(self.to_data_frame(), fname, schema=TRACE_SCHEMA)

    def timing_to_csv(self, fname: str) -> None:
        df = self.to_data_frame(timing=True)
        cols = ["repetition", "step", "action", "expanded", "generated", "search_time"]
        write_csv(df[cols], fname, schema=TRACE_SCHEMA)

    def summary(self) -> Dict[str, Any]:
        """Robot share per action and overall, and takt violations."""
        per_action: Dict[str, Dict[str, Any]] = {}
        robot_time = total_time = 0.0
        for r in self._records:
            d = per_action.setdefault(r.action, {"executions": 0, "robot": 0})
            d["executions"] += 1
            total_time += r.elapsed
            if r.kind == "robot":
                d["robot"] += 1
                robot_time += r.elapsed

        for d in per_action.values():
            d["robot_percent"] = 100.0 * d["robot"] / d["executions"]

        n_robot = sum(d["robot"] for d in per_action.values())
        return {
            "schema": TRACE_SCHEMA,
            "repetitions": self.repetitions(),
            "actions": per_action,
            "robot_percent": 100.0 * n_robot / len(self) if len(self) else 0.0,
            "robot_time_percent": (
                100.0 * robot_time / total_time if total_time > 0 else 0.0
            ),
            "takt": [asdict(t) for t in self._takt],
            "takt_violations": sum(t.violated for t in self._takt),
        }

    def summary_to_json(self, fname: str) -> None:
        write_json(self.summary(), fname)


def _empty_row() -> Dict[str, Any]:
    nan = float("nan")
    wear = (nan,) * len(JOINTS)
    record = TraceRecord(0, 0, "", "", "", wear, nan, nan, nan, wear, 0.0, 0.0, 0, 0)
    return record.row()
