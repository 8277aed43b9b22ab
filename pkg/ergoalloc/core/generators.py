"""Generators of benchmark assemblies.

Two families of task representation are generated:

- sequential: pieces form a chain with N-1 interconnections, any
  contiguous range of pieces is a feasible sub-assembly, e.g. a pen
  (cap, ink, body and bottom).
- scarce: pieces only attach to a growing hub in a fixed order, e.g. a
  table top and its legs.
"""

from typing import List, Sequence

from ergoalloc.core.assembly import Worker, make_workers
from ergoalloc.core.errors import InvalidAssemblyError
from ergoalloc.core.graph import AndOrGraph, Operation

__all__ = ["build_sequential", "build_scarce"]


def build_sequential(n_pieces: int, agents: int | Sequence[Worker]) -> AndOrGraph:
    """Sequentially connected assembly.

    Nodes are the contiguous ranges `[i..j]`, and a range of length L
    can be cut at L-1 positions. The graph has M(M+1)/2 nodes and
    |agents|·(M³-M)/6 hyper-arcs.

    Parameters
    ----------
    n_pieces : int
        Number of atomic pieces M, at least 2.
    agents : int | list of Worker
        If an int, one human and robots for the rest.
    """
    _check_size(n_pieces)
    workers = _get_workers(agents)

    actions: List[str] = []
    ops: List[Operation] = []
    for length in range(n_pieces, 1, -1):
        for i in range(0, n_pieces - length + 1):
            j = i + length - 1
            father = _range_mask(i, j)
            for k in range(i, j):
                left, right = _range_mask(i, k), _range_mask(k + 1, j)
                ops.append(Operation(father, left, right, len(actions)))
                actions.append(f"join[{i}..{k}|{k + 1}..{j}]")

    pieces = [f"p{i}" for i in range(n_pieces)]
    return AndOrGraph(pieces, actions, workers, ops, source=f"sequential:{n_pieces}")


def build_scarce(n_pieces: int, agents: int | Sequence[Worker]) -> AndOrGraph:
    """Scarcely connected assembly.

    Piece `p_k` attaches to the partial assembly `{p_0..p_k-1}`, nothing
    else connects. The graph has 2M-1 nodes and |agents|·(M-1)
    hyper-arcs.
    """
    _check_size(n_pieces)
    workers = _get_workers(agents)

    actions: List[str] = []
    ops: List[Operation] = []
    for k in range(n_pieces - 1, 0, -1):
        hub = _range_mask(0, k - 1)
        ops.append(Operation(hub | (1 << k), hub, 1 << k, len(actions)))
        actions.append(f"attach[p{k}]")

    pieces = [f"p{i}" for i in range(n_pieces)]
    return AndOrGraph(pieces, actions, workers, ops, source=f"scarce:{n_pieces}")


def _range_mask(i: int, j: int) -> int:
    return ((1 << (j + 1)) - 1) ^ ((1 << i) - 1)


def _check_size(n_pieces: int) -> None:
    if n_pieces < 2:
        raise InvalidAssemblyError(
            f"an assembly needs at least 2 pieces, got {n_pieces}"
        )


def _get_workers(agents: int | Sequence[Worker]) -> List[Worker]:
    if isinstance(agents, int):
        return make_workers(agents)

    workers = list(agents)
    if len(workers) == 0:
        raise InvalidAssemblyError("at least one agent is required")
    return workers
