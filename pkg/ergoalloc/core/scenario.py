"""Scenario files.

A scenario is a JSON document, `schema: 1`, describing the pieces, the
workers, the actions with their execution data, the assembly operations
and the ergonomic settings of a collaborative assembly cell.

Operations are given either explicitly,

    {"action": "a1", "father": ["bench", "J"], "children": [["bench"], ["J"]]}

or as a template joining pieces onto a hub that may already hold any
subset of optional pieces,

    {"action": "a2", "join": ["L"], "onto": ["bench", "J"], "optional": ["S1"]}

which expands to one operation per subset. Precedence pairs `[a, b]`
keep only the operations of `b` whose children already hold a product
of `a`, and only the operations of `a` whose children hold no product
of `b`. Paths of trajectory files are relative to the scenario file.
"""

import itertools
import json
import logging
import os
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Literal, Mapping, Optional, Sequence, Tuple

from typing_extensions import Self

from ergoalloc.core.assembly import SubAssembly, Worker, check_workers
from ergoalloc.core.errors import InvalidAssemblyError, ScenarioError
from ergoalloc.core.graph import AndOrGraph, Operation, prune
from ergoalloc.kwear.model import KWearParams
from ergoalloc.kwear.rula import JOINTS, RulaTable, RulaTables, get_rula_tables
from ergoalloc.kwear.trajectory import TrajectoryTemplate
from ergoalloc.utils import read_json

__all__ = [
    "SCENARIO_SCHEMA",
    "ActionExecutionSpec",
    "Scenario",
    "load_scenario",
    "parse_scenario",
    "SCENARIO_DIR",
    "builtin_scenarios",
    "resolve_scenario",
]

SCENARIO_SCHEMA = 1
SCENARIO_DIR = os.path.join(
    os.path.dirname(os.path.dirname(__file__)), "data", "scenarios"
)


@dataclass(frozen=True)
class ActionExecutionSpec:
    """How an action is executed by each kind of worker.

    Attributes
    ----------
    action : int
    label : str
    durations : dict of str to float
        Nominal seconds, keyed by worker name or worker kind.
    trajectories : tuple of str
        Absolute paths of the recorded human executions.
    template : TrajectoryTemplate, optional
        Synthesized human executions, used when no file is given.
    """

    action: int
    label: str
    durations: Mapping[str, float] = field(default_factory=dict)
    trajectories: Tuple[str, ...] = ()
    template: Optional[TrajectoryTemplate] = None

    def duration(self, worker: Worker) -> Optional[float]:
        if worker.name in self.durations:
            return self.durations[worker.name]
        return self.durations.get(worker.kind)

    def human_duration(self) -> Optional[float]:
        return self.durations.get("human")

    def has_human_data(self) -> bool:
        return len(self.trajectories) > 0 or self.template is not None

    def n_executions(self) -> int:
        if len(self.trajectories) > 0:
            return len(self.trajectories)
        return self.template.executions if self.template is not None else 0


@dataclass(frozen=True)
class Scenario:
    """Everything the simulation needs about one assembly cell.

    Attributes
    ----------
    pieces : tuple of str
    workers : tuple of Worker
    actions : tuple of ActionExecutionSpec
        Indexed by action id.
    operations : tuple of Operation
        Operations left after precedence filtering.
    pruned : tuple of (action, worker)
        Pairs excluded from the search at load time.
    v_th : tuple of float
        Wear threshold per joint, in `JOINTS` order.
    gamma : float
        Penalty added to a human arc over threshold.
    """

    name: str
    pieces: Tuple[str, ...]
    workers: Tuple[Worker, ...]
    actions: Tuple[ActionExecutionSpec, ...]
    operations: Tuple[Operation, ...]
    precedence: Tuple[Tuple[int, int], ...] = ()
    pruned: Tuple[Tuple[int, int], ...] = ()
    seed: int = 0
    v_th: Tuple[float, ...] = (0.8,) * len(JOINTS)
    gamma: float = 100.0
    kwear: KWearParams = field(default_factory=KWearParams)
    rula_tables: RulaTables = field(default_factory=get_rula_tables, hash=False)
    t_takt: Optional[float] = None
    baseline_scores: Mapping[str, int] = field(default_factory=dict, hash=False)
    source: str = ""

    @property
    def action_labels(self) -> List[str]:
        return [a.label for a in self.actions]

    def action_spec(self, action: int | str) -> ActionExecutionSpec:
        if isinstance(action, str):
            for spec in self.actions:
                if spec.label == action:
                    return spec
            raise KeyError(f"unknown action `{action}`")
        return self.actions[action]

    def human(self) -> Optional[Worker]:
        return next((w for w in self.workers if w.is_human()), None)

    def robots(self) -> List[Worker]:
        return [w for w in self.workers if not w.is_human()]

    def human_actions(self) -> List[str]:
        """Labels of actions the human may be assigned."""
        hid = next((i for i, w in enumerate(self.workers) if w.is_human()), None)
        if hid is None:
            return []
        return [a.label for a in self.actions if (a.action, hid) not in self.pruned]

    def with_seed(self, seed: int) -> Self:
        return replace(self, seed=seed)

    def build_graph(self) -> AndOrGraph:
        """A fresh graph with zero costs and the scenario prunes applied."""
        graph = AndOrGraph(
            self.pieces,
            self.action_labels,
            self.workers,
            self.operations,
            source=self.source,
        )
        for action, agent in self.pruned:
            prune(graph, action, agent)
        return graph


def load_scenario(
    path: str, *, encoding: Literal["detect"] | str = "utf-8"
) -> Tuple[AndOrGraph, Scenario]:
    """Read a scenario file and build its graph.

    Raises
    ------
    ScenarioError
        Malformed JSON, with line and column, or invalid field.
    InvalidAssemblyError
        Operations violating the partition rules, or no action.
    InfeasibleAssemblyError
        Prunes leaving no plan for the complete assembly.
    """
    try:
        data = read_json(path, encoding=encoding)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e
    except OSError as e:
        raise ScenarioError(f"fails to read scenario: {path}") from e

    scenario = parse_scenario(data, root=os.path.dirname(os.path.abspath(path)))
    scenario = replace(scenario, source=os.path.abspath(path))
    graph = scenario.build_graph()
    logging.info(
        "scenario `%s` loaded: %d nodes, %d hyper-arcs",
        scenario.name,
        graph.number_of_nodes(),
        graph.number_of_arcs(),
    )
    return graph, scenario


def builtin_scenarios() -> List[str]:
    """Names of the scenarios shipped with the package."""
    files = sorted(os.listdir(SCENARIO_DIR)) if os.path.isdir(SCENARIO_DIR) else []
    return [os.path.splitext(f)[0] for f in files if f.endswith(".json")]


def resolve_scenario(path_or_name: str) -> str:
    """Path of a scenario file, or of a shipped scenario by name."""
    if os.path.exists(path_or_name) or path_or_name not in builtin_scenarios():
        return path_or_name
    return os.path.join(SCENARIO_DIR, f"{path_or_name}.json")


def parse_scenario(data: Mapping[str, Any], *, root: str = "") -> Scenario:
    """Validate a scenario document.

    Parameters
    ----------
    data : dict
        Decoded JSON document.
    root : str
        Directory against which relative trajectory paths are resolved.
    """
    if not isinstance(data, Mapping):
        raise ScenarioError("a scenario must be a JSON object")
    if (schema := data.get("schema")) != SCENARIO_SCHEMA:
        raise ScenarioError(f"unsupported schema `{schema}`", field="schema")

    pieces = _get_names(data, "pieces")
    workers = _parse_workers(_get(data, "agents", list), "agents")
    actions_data = _get(data, "actions", list)
    if len(actions_data) == 0:
        raise InvalidAssemblyError("no actions")

    labels = [
        _get(a, "label", str, f"actions[{i}]") for i, a in enumerate(actions_data)
    ]
    if len(set(labels)) != len(labels):
        raise ScenarioError(f"duplicated action labels: {labels}", field="actions")

    lookup = _Lookup(pieces, labels, workers)
    actions, pruned = [], []
    for i, a in enumerate(actions_data):
        spec, infeasible = _parse_action(a, i, lookup, root)
        actions.append(spec)
        pruned.extend((i, w) for w in infeasible)

    for i, pair in enumerate(data.get("prune", [])):
        where = f"prune[{i}]"
        if not isinstance(pair, list) or len(pair) != 2:
            raise ScenarioError("expected [action, agent]", field=where)
        pruned.append((lookup.action(pair[0], where), lookup.worker(pair[1], where)))

    operations: List[Operation] = []
    for i, op in enumerate(_get(data, "operations", list)):
        operations.extend(_parse_operation(op, i, lookup))

    precedence = []
    for i, pair in enumerate(data.get("precedence", [])):
        where = f"precedence[{i}]"
        if not isinstance(pair, list) or len(pair) != 2:
            raise ScenarioError("expected [before, after]", field=where)
        before, after = lookup.action(pair[0], where), lookup.action(pair[1], where)
        precedence.append((before, after))

    operations = apply_precedence(operations, precedence)
    _check_human_data(actions, workers, pruned)

    ergo = data.get("ergonomics", {})
    try:
        kwear = KWearParams(**ergo.get("kwear", {}))
    except (TypeError, ValueError) as e:
        raise ScenarioError(str(e), field="ergonomics.kwear") from e

    gamma = float(ergo.get("gamma", 100.0))
    if not gamma > kwear.v_max:
        raise ScenarioError("gamma must exceed v_max", field="ergonomics.gamma")

    takt = data.get("takt", {}).get("t_takt")
    if takt is not None and not float(takt) > 0:
        raise ScenarioError("takt time must be positive", field="takt.t_takt")

    tables = {
        j: _parse_table(t, f"rula_tables.{j}")
        for j, t in data.get("rula_tables", {}).items()
    }
    try:
        rula_tables = get_rula_tables(tables)
    except ValueError as e:
        raise ScenarioError(str(e), field="rula_tables") from e

    baseline = {str(k): int(v) for k, v in data.get("baseline_scores", {}).items()}
    for k in baseline:
        lookup.action(k, "baseline_scores")

    return Scenario(
        name=str(data.get("name", "")),
        pieces=tuple(pieces),
        workers=tuple(workers),
        actions=tuple(actions),
        operations=tuple(operations),
        precedence=tuple(precedence),
        pruned=tuple(dict.fromkeys(pruned)),
        seed=int(data.get("seed", 0)),
        v_th=_parse_thresholds(ergo.get("v_th", 0.8)),
        gamma=gamma,
        kwear=kwear,
        rula_tables=rula_tables,
        t_takt=None if takt is None else float(takt),
        baseline_scores=baseline,
    )


def apply_precedence(
    operations: Sequence[Operation], precedence: Sequence[Tuple[int, int]]
) -> List[Operation]:
    """Drop the operations violating any `(before, after)` pair."""
    products: Dict[int, List[SubAssembly]] = {}
    for op in operations:
        products.setdefault(op.action, []).append(op.father)

    def holds(op: Operation, action: int) -> bool:
        return any(
            c & p == p for c in (op.left, op.right) for p in products.get(action, [])
        )

    kept = []
    for op in operations:
        ok = all(holds(op, b) for b, a in precedence if a == op.action)
        ok &= not any(holds(op, c) for a, c in precedence if a == op.action)
        if ok:
            kept.append(op)

    if dropped := len(operations) - len(kept):
        logging.debug("%d operation(s) dropped by precedence", dropped)
    return kept


class _Lookup:
    def __init__(self, pieces: List[str], actions: List[str], workers: List[Worker]):
        self.pieces = {p: i for i, p in enumerate(pieces)}
        self.actions = {a: i for i, a in enumerate(actions)}
        self.workers = {w.name: i for i, w in enumerate(workers)}

    def mask(self, names: Any, where: str) -> SubAssembly:
        if not isinstance(names, list) or len(names) == 0:
            raise ScenarioError("expected a non-empty list of pieces", field=where)

        mask = 0
        for n in names:
            if n not in self.pieces:
                raise ScenarioError(f"unknown piece `{n}`", field=where)
            if mask & (1 << self.pieces[n]):
                raise ScenarioError(f"piece `{n}` listed twice", field=where)
            mask |= 1 << self.pieces[n]
        return mask

    def action(self, label: Any, where: str) -> int:
        if label not in self.actions:
            raise ScenarioError(f"unknown action `{label}`", field=where)
        return self.actions[label]

    def worker(self, name: Any, where: str) -> int:
        if name not in self.workers:
            raise ScenarioError(f"unknown agent `{name}`", field=where)
        return self.workers[name]


def _get(d: Any, key: str, kind: type, where: str = "") -> Any:
    path = f"{where}.{key}" if where else key
    if not isinstance(d, Mapping) or key not in d:
        raise ScenarioError("missing field", field=path)
    if not isinstance(d[key], kind):
        raise ScenarioError(f"expected {kind.__name__}", field=path)
    return d[key]


def _get_names(d: Mapping[str, Any], key: str) -> List[str]:
    names = _get(d, key, list)
    if not all(isinstance(n, str) for n in names):
        raise ScenarioError("expected a list of names", field=key)
    if len(set(names)) != len(names):
        raise ScenarioError(f"duplicated names: {names}", field=key)
    return names


def _parse_workers(agents: List[Any], where: str) -> List[Worker]:
    workers = []
    for i, a in enumerate(agents):
        w = f"{where}[{i}]"
        kind = _get(a, "kind", str, w)
        if kind not in ("human", "robot"):
            raise ScenarioError(f"unknown agent kind `{kind}`", field=f"{w}.kind")

        cost = a.get("cost")
        if kind == "robot":
            if not isinstance(cost, (int, float)) or cost < 0:
                raise ScenarioError(
                    "robots need a non-negative cost", field=f"{w}.cost"
                )
            cost = float(cost)
        workers.append(Worker(_get(a, "name", str, w), kind, cost))

    try:
        check_workers(workers)
    except InvalidAssemblyError as e:
        raise ScenarioError(str(e), field=where) from e
    return workers


def _parse_action(
    a: Mapping[str, Any], i: int, lookup: _Lookup, root: str
) -> Tuple[ActionExecutionSpec, List[int]]:
    where = f"actions[{i}]"
    feasible = a.get("agents")
    if feasible is None:
        infeasible = []
    else:
        allowed = {lookup.worker(n, f"{where}.agents") for n in feasible}
        infeasible = [w for w in lookup.workers.values() if w not in allowed]

    durations = {}
    for k, v in a.get("durations", {}).items():
        if not isinstance(v, (int, float)) or not v > 0:
            raise ScenarioError(
                "durations must be positive", field=f"{where}.durations.{k}"
            )
        durations[k] = float(v)

    files, template = [], None
    traj = a.get("trajectories", [])
    if isinstance(traj, list):
        files = [os.path.normpath(os.path.join(root, f)) for f in traj]
    elif isinstance(traj, Mapping) and "synthetic" in traj:
        try:
            template = TrajectoryTemplate.from_dict(traj["synthetic"])
        except (KeyError, TypeError, ValueError) as e:
            raise ScenarioError(str(e), field=f"{where}.trajectories.synthetic") from e
    else:
        raise ScenarioError(
            "expected a list of files or a synthetic template",
            field=f"{where}.trajectories",
        )

    spec = ActionExecutionSpec(i, a["label"], durations, tuple(files), template)
    return spec, infeasible


def _parse_operation(op: Any, i: int, lookup: _Lookup) -> List[Operation]:
    where = f"operations[{i}]"
    label = _get(op, "action", str, where)
    action = lookup.action(label, f"{where}.action")

    if "father" in op:
        father = lookup.mask(op["father"], f"{where}.father")
        children = _get(op, "children", list, where)
        if len(children) != 2:
            raise ScenarioError("expected two children", field=f"{where}.children")
        left = lookup.mask(children[0], f"{where}.children[0]")
        right = lookup.mask(children[1], f"{where}.children[1]")
        _check_tiling(father, left, right, f"{where} ({label})")
        return [Operation(father, left, right, action)]

    join = lookup.mask(_get(op, "join", list, where), f"{where}.join")
    onto = lookup.mask(_get(op, "onto", list, where), f"{where}.onto")
    optional = op.get("optional", [])
    optional = lookup.mask(optional, f"{where}.optional") if optional else 0
    if join & onto or (join | onto) & optional:
        raise InvalidAssemblyError(f"{where} ({label}): children overlap")

    bits = [1 << k for k in range(optional.bit_length()) if optional >> k & 1]
    ops = []
    for r in range(len(bits) + 1):
        for subset in itertools.combinations(bits, r):
            hub = onto | sum(subset)
            ops.append(Operation(hub | join, hub, join, action))
    return ops


def _check_tiling(father: int, left: int, right: int, where: str) -> None:
    if left & right:
        raise InvalidAssemblyError(f"{where}: children overlap")
    if left | right != father:
        raise InvalidAssemblyError(f"{where}: children do not tile the father")


def _check_human_data(
    actions: List[ActionExecutionSpec],
    workers: List[Worker],
    pruned: List[Tuple[int, int]],
) -> None:
    for spec in actions:
        for j, w in enumerate(workers):
            if (spec.action, j) in pruned:
                continue
            where = f"actions[{spec.action}]"
            if w.is_human() and not spec.has_human_data():
                raise ScenarioError("human actions need trajectories", field=where)
            if not w.is_human() and spec.duration(w) is None:
                raise ScenarioError(
                    f"no duration for agent `{w.name}`", field=f"{where}.durations"
                )


def _parse_thresholds(v_th: Any) -> Tuple[float, ...]:
    if isinstance(v_th, (int, float)):
        values = [float(v_th)] * len(JOINTS)
    elif isinstance(v_th, Mapping):
        try:
            values = [float(v_th[j]) for j in JOINTS]
        except KeyError as e:
            raise ScenarioError(f"missing joint {e}", field="ergonomics.v_th") from e
    else:
        raise ScenarioError(
            "expected a number or a joint mapping", field="ergonomics.v_th"
        )

    if any(not 0 < v < 1 for v in values):
        raise ScenarioError("thresholds must be in (0, 1)", field="ergonomics.v_th")
    return tuple(values)


def _parse_table(d: Any, where: str) -> RulaTable:
    try:
        return RulaTable.from_dict(d)
    except (KeyError, TypeError, ValueError) as e:
        raise ScenarioError(str(e), field=where) from e
