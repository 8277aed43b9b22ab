"""AND/OR graph of an assembly task."""

import hashlib
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np
import numpy.typing as npt

from ergoalloc.core.assembly import (
    MAX_PIECES,
    Configuration,
    SubAssembly,
    Worker,
    check_workers,
    full_mask,
    pieces_of,
)
from ergoalloc.core.errors import (
    ArcLookupError,
    InfeasibleAssemblyError,
    InvalidAssemblyError,
)

__all__ = ["Operation", "HyperArc", "AndOrGraph", "prune", "unprune", "set_cost"]


@dataclass(frozen=True)
class Operation:
    """An undirected two-to-one assembly operation, before agent duplication."""

    father: SubAssembly
    left: SubAssembly
    right: SubAssembly
    action: int


@dataclass(frozen=True)
class HyperArc:
    """A read-only view of one hyper-arc."""

    id: int
    father: SubAssembly
    children: Tuple[SubAssembly, SubAssembly]
    action: int
    agent: int
    cost: float
    pruned: bool


class AndOrGraph:
    """AND/OR graph with hyper-arcs duplicated per agent.

    Topology is fixed at construction. Only the cost table and the prune
    flags change afterwards, and a search must run on a snapshot of the
    costs taken before it starts.

    Attributes
    ----------
    pieces : list of str
        Names of the atomic pieces, index is the piece id.
    actions : list of str
        Labels of the actions, index is the action id.
    workers : list of Worker
    father, left, right : array of object, shape (n_arcs,)
        Python int bit sets, kept as object arrays so masks of up to
        64 pieces never overflow.
    action, agent : array of int32, shape (n_arcs,)
    costs : array of float64, shape (n_arcs,)
    pruned : array of bool, shape (n_arcs,)
    """

    pieces: List[str]
    actions: List[str]
    workers: List[Worker]

    def __init__(
        self,
        pieces: Sequence[str],
        actions: Sequence[str],
        workers: Sequence[Worker],
        operations: Iterable[Operation],
        *,
        source: str = "",
    ) -> None:
        n = len(pieces)
        if n < 2:
            raise InvalidAssemblyError(f"an assembly needs at least 2 pieces, got {n}")
        if n > MAX_PIECES:
            raise InvalidAssemblyError(f"at most {MAX_PIECES} pieces, got {n}")
        if len(actions) == 0:
            raise InvalidAssemblyError("no actions")

        check_workers(workers)
        self.pieces = list(pieces)
        self.actions = list(actions)
        self.workers = list(workers)
        self.source = source

        ops = list(operations)
        for i, op in enumerate(ops):
            self._check_operation(i, op)

        ops = _useful_operations(ops, full_mask(n))
        if len(ops) == 0:
            raise InvalidAssemblyError("no operation produces the complete assembly")

        n_agents = len(self.workers)
        father, left, right, action, agent = [], [], [], [], []
        for op in ops:
            for j in range(n_agents):
                father.append(op.father)
                left.append(op.left)
                right.append(op.right)
                action.append(op.action)
                agent.append(j)

        self.father = np.array(father, dtype=object)
        self.left = np.array(left, dtype=object)
        self.right = np.array(right, dtype=object)
        self.action = np.array(action, dtype=np.int32)
        self.agent = np.array(agent, dtype=np.int32)
        self.costs = np.zeros(len(father), dtype=np.float64)
        self.pruned = np.zeros(len(father), dtype=np.bool_)

        if not self.solvable():
            raise InvalidAssemblyError(
                "the operations cannot decompose the root down to single pieces"
            )

    def __repr__(self) -> str:
        return (
            f"AND/OR graph with {self.number_of_nodes()} nodes "
            f"and {self.number_of_arcs()} hyper-arcs"
        )

    def __len__(self) -> int:
        return self.number_of_arcs()

    def __iter__(self) -> Iterator[HyperArc]:
        return (self.arc(i) for i in range(self.number_of_arcs()))

    @property
    def n_pieces(self) -> int:
        return len(self.pieces)

    @property
    def root(self) -> SubAssembly:
        return full_mask(self.n_pieces)

    @cached_property
    def leaves(self) -> Tuple[SubAssembly, ...]:
        return tuple(1 << i for i in range(self.n_pieces))

    @cached_property
    def nodes(self) -> Tuple[SubAssembly, ...]:
        """All sub-assemblies, sorted by size then by bits."""
        s: Set[SubAssembly] = set(self.leaves)
        s.update(self.father.tolist())
        s.update(self.left.tolist())
        s.update(self.right.tolist())
        return tuple(sorted(s, key=lambda m: (m.bit_count(), m)))

    @cached_property
    def arcs_by_father(self) -> Dict[SubAssembly, Tuple[int, ...]]:
        """Arc ids grouped by father, pruned arcs included."""
        out: Dict[SubAssembly, List[int]] = {}
        for i, f in enumerate(self.father.tolist()):
            out.setdefault(f, []).append(i)
        return {k: tuple(v) for k, v in out.items()}

    def number_of_nodes(self) -> int:
        return len(self.nodes)

    def number_of_arcs(self) -> int:
        return self.father.shape[0]

    def arc(self, idx: int) -> HyperArc:
        return HyperArc(
            id=idx,
            father=self.father[idx],
            children=(self.left[idx], self.right[idx]),
            action=int(self.action[idx]),
            agent=int(self.agent[idx]),
            cost=float(self.costs[idx]),
            pruned=bool(self.pruned[idx]),
        )

    def initial_configuration(self) -> Configuration:
        return Configuration.initial(self.n_pieces)

    def final_configuration(self) -> Configuration:
        return Configuration.final(self.n_pieces)

    def action_index(self, action: int | str) -> int:
        if isinstance(action, str):
            try:
                return self.actions.index(action)
            except ValueError as e:
                raise ArcLookupError(f"unknown action `{action}`") from e

        if not 0 <= action < len(self.actions):
            raise ArcLookupError(f"unknown action id {action}")
        return int(action)

    def worker_index(self, agent: int | str | Worker) -> int:
        if isinstance(agent, Worker):
            agent = agent.name
        if isinstance(agent, str):
            for i, w in enumerate(self.workers):
                if w.name == agent:
                    return i
            raise ArcLookupError(f"unknown worker `{agent}`")

        if not 0 <= agent < len(self.workers):
            raise ArcLookupError(f"unknown worker id {agent}")
        return int(agent)

    def arc_ids(
        self,
        action: int | str,
        agent: int | str | Worker,
        *,
        include_pruned: bool = False,
    ) -> npt.NDArray[np.int64]:
        mask = (self.action == self.action_index(action)) & (
            self.agent == self.worker_index(agent)
        )
        if not include_pruned:
            mask &= ~self.pruned
        return np.flatnonzero(mask)

    def human_index(self) -> Optional[int]:
        for i, w in enumerate(self.workers):
            if w.is_human():
                return i
        return None

    def cost_snapshot(self) -> npt.NDArray[np.float64]:
        """A read-only copy of the current cost table."""
        snapshot = self.costs.copy()
        snapshot.flags.writeable = False
        return snapshot

    def set_costs(self, costs: npt.ArrayLike) -> None:
        """Replace the whole cost table."""
        costs = np.asarray(costs, dtype=np.float64)
        if costs.shape != self.costs.shape:
            raise ValueError(f"expected {self.costs.shape} costs, got {costs.shape}")
        if np.any(costs < 0) or not np.all(np.isfinite(costs)):
            raise ValueError("hyper-arc costs must be finite and non-negative")
        self.costs[:] = costs

    def solvable(self, pruned: Optional[npt.NDArray[np.bool_]] = None) -> bool:
        """Whether the root can still be decomposed down to single pieces."""
        pruned = self.pruned if pruned is None else pruned
        ok: Set[SubAssembly] = set(self.leaves)
        for node in self.nodes:  # children always come before fathers
            for i in self.arcs_by_father.get(node, ()):
                if not pruned[i] and self.left[i] in ok and self.right[i] in ok:
                    ok.add(node)
                    break
        return self.root in ok

    def topology_hash(self) -> str:
        """Digest of the topology and the prune flags, ignoring costs."""
        h = hashlib.sha1()
        h.update(",".join(self.pieces).encode("utf-8"))
        for arr in (self.father, self.left, self.right):
            h.update(",".join(str(m) for m in arr.tolist()).encode("utf-8"))
        h.update(self.action.tobytes())
        h.update(self.agent.tobytes())
        h.update(self.pruned.tobytes())
        return h.hexdigest()

    def arc_label(self, idx: int) -> str:
        name = self.workers[self.agent[idx]].name
        return f"{self.actions[self.action[idx]]}/{name}/{self.costs[idx]:g}"

    def node_label(self, mask: SubAssembly) -> str:
        return "+".join(self.pieces[i] for i in pieces_of(mask))

    def to_dot(self, name: str = "aog", *, include_pruned: bool = False):
        """Export as a pydot graph.

        Each hyper-arc becomes a small point node linked from its father
        and to its two children, labelled `action/agent/cost`.
        """
        import pydot

        graph = pydot.Dot(name, graph_type="digraph", bgcolor="white")
        for node in self.nodes:
            shape = "box" if node == self.root else "ellipse"
            graph.add_node(
                pydot.Node(f"n{node}", label=f'"{self.node_label(node)}"', shape=shape)
            )

        for i in range(self.number_of_arcs()):
            if self.pruned[i] and not include_pruned:
                continue
            hub = f"h{i}"
            style = "dashed" if self.pruned[i] else "solid"
            graph.add_node(pydot.Node(hub, shape="point", label='""'))
            graph.add_edge(
                pydot.Edge(
                    f"n{self.father[i]}",
                    hub,
                    label=f'"{self.arc_label(i)}"',
                    style=style,
                )
            )
            graph.add_edge(pydot.Edge(hub, f"n{self.left[i]}", style=style))
            graph.add_edge(pydot.Edge(hub, f"n{self.right[i]}", style=style))

        return graph

    def _check_operation(self, i: int, op: Operation) -> None:
        valid = 0 <= op.action < len(self.actions)
        label = self.actions[op.action] if valid else op.action
        where = f"operation #{i} ({label})"
        if not 0 <= op.action < len(self.actions):
            raise InvalidAssemblyError(f"{where}: unknown action id {op.action}")
        if op.left == 0 or op.right == 0:
            raise InvalidAssemblyError(f"{where}: empty child")
        if op.left & op.right:
            raise InvalidAssemblyError(f"{where}: children overlap")
        if op.left | op.right != op.father:
            raise InvalidAssemblyError(f"{where}: children do not tile the father")
        if op.father & ~full_mask(self.n_pieces):
            raise InvalidAssemblyError(f"{where}: unknown pieces")


def _useful_operations(ops: List[Operation], root: SubAssembly) -> List[Operation]:
    """Drop dead or unreachable operations, keeping input order.

    An operation is dead when one of its children cannot be decomposed
    down to single pieces by the remaining operations.
    """
    ok: Set[SubAssembly] = set()
    for op in sorted(ops, key=lambda o: o.father.bit_count()):
        if all(c.bit_count() == 1 or c in ok for c in (op.left, op.right)):
            ok.add(op.father)
    ops = [
        op for op in ops
        if all(c.bit_count() == 1 or c in ok for c in (op.left, op.right))
    ]

    by_father: Dict[SubAssembly, List[int]] = {}
    for i, op in enumerate(ops):
        by_father.setdefault(op.father, []).append(i)

    seen, stack, keep = {root}, [root], set()
    while stack:
        node = stack.pop()
        for i in by_father.get(node, []):
            keep.add(i)
            for child in (ops[i].left, ops[i].right):
                if child not in seen:
                    seen.add(child)
                    stack.append(child)

    if dropped := len(ops) - len(keep):
        logging.debug("%d operation(s) unreachable from the root are ignored", dropped)
    return [op for i, op in enumerate(ops) if i in keep]


def prune(graph: AndOrGraph, action: int | str, agent: int | str | Worker) -> None:
    """Exclude every hyper-arc of an (action, agent) pair from the search.

    Raises
    ------
    InfeasibleAssemblyError
        If the assembly could no longer be completed; the graph is left
        unchanged in that case.
    """
    ids = graph.arc_ids(action, agent, include_pruned=True)
    if len(ids) == 0:
        raise ArcLookupError(f"no hyper-arc for ({action}, {agent})")

    pruned = graph.pruned.copy()
    pruned[ids] = True
    if not graph.solvable(pruned):
        raise InfeasibleAssemblyError(
            f"pruning ({action}, {agent}) leaves no plan for the complete assembly"
        )
    graph.pruned[:] = pruned


def unprune(graph: AndOrGraph, action: int | str, agent: int | str | Worker) -> None:
    ids = graph.arc_ids(action, agent, include_pruned=True)
    if len(ids) == 0:
        raise ArcLookupError(f"no hyper-arc for ({action}, {agent})")
    graph.pruned[ids] = False


def set_cost(
    graph: AndOrGraph, action: int | str, agent: int | str | Worker, cost: float
) -> None:
    """Set the cost of every non-pruned hyper-arc of an (action, agent) pair."""
    if not np.isfinite(cost) or cost < 0:
        raise ValueError(f"hyper-arc cost must be finite and non-negative, got {cost}")

    ids = graph.arc_ids(action, agent)
    if len(ids) == 0:
        raise ArcLookupError(f"no active hyper-arc for ({action}, {agent})")
    graph.costs[ids] = cost
