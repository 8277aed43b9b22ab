"""Pieces, sub-assemblies and assembly configurations.

Notes
-----
A sub-assembly is stored as an `int` bit set over piece indices, bit `i`
set when piece `i` belongs to it. Python ints are used instead of numpy
integers because the search inner loop is dominated by `&`, `|` and
hashing of small tuples.
"""

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Iterator, List, Literal, Sequence, Tuple

from typing_extensions import Self

from ergoalloc.core.errors import InvalidAssemblyError

__all__ = [
    "MAX_PIECES",
    "SubAssembly",
    "mask_of",
    "pieces_of",
    "lowest_piece",
    "full_mask",
    "Configuration",
    "WorkerKind",
    "Worker",
    "make_workers",
    "check_workers",
    "is_union_of",
    "union_all",
]

MAX_PIECES = 64

SubAssembly = int  # bit set over piece indices
WorkerKind = Literal["human", "robot"]


def mask_of(pieces: Iterable[int]) -> SubAssembly:
    """Bit set of piece indices."""
    mask = 0
    for p in pieces:
        if p < 0 or p >= MAX_PIECES:
            raise InvalidAssemblyError(f"piece index out of range: {p}")
        mask |= 1 << p
    return mask


def pieces_of(mask: SubAssembly) -> List[int]:
    """Piece indices of a bit set, ascending."""
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def lowest_piece(mask: SubAssembly) -> int:
    return (mask & -mask).bit_length() - 1


def full_mask(n_pieces: int) -> SubAssembly:
    return (1 << n_pieces) - 1


@dataclass(frozen=True, order=True)
class Configuration:
    """Assembly configuration, a partition of all pieces.

    Parts are kept sorted by their smallest piece, so two configurations
    with the same parts compare and hash equal whatever order they were
    given in. Ordering is lexicographic over the sorted parts, which the
    search uses for tie-breaking.
    """

    parts: Tuple[SubAssembly, ...]
    n_pieces: int = field(compare=False, default=0)

    @classmethod
    def from_parts(cls, parts: Iterable[SubAssembly], n_pieces: int) -> Self:
        parts = list(parts)
        union = 0
        for p in parts:
            if p == 0:
                raise InvalidAssemblyError("empty sub-assembly in configuration")
            if union & p:
                raise InvalidAssemblyError(
                    f"piece(s) {pieces_of(union & p)} belong to two sub-assemblies"
                )
            union |= p

        if union != full_mask(n_pieces):
            missing = pieces_of(full_mask(n_pieces) & ~union)
            raise InvalidAssemblyError(f"configuration misses piece(s) {missing}")

        return cls(_canonical(parts), n_pieces)

    @classmethod
    def initial(cls, n_pieces: int) -> Self:
        """All pieces separated."""
        return cls(tuple(1 << i for i in range(n_pieces)), n_pieces)

    @classmethod
    def final(cls, n_pieces: int) -> Self:
        """All pieces joined."""
        return cls((full_mask(n_pieces),), n_pieces)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[SubAssembly]:
        return iter(self.parts)

    def __contains__(self, part: object) -> bool:
        return part in self.parts

    def __repr__(self) -> str:
        return "{" + ", ".join(str(pieces_of(p)) for p in self.parts) + "}"

    def is_final(self) -> bool:
        return len(self.parts) == 1

    def split(self, father: SubAssembly, left: SubAssembly, right: SubAssembly) -> Self:
        """Replace `father` by its two children (disassembly)."""
        parts = [p for p in self.parts if p != father]
        assert len(parts) + 1 == len(self.parts), "father is not a part"
        parts.extend((left, right))
        return type(self)(_canonical(parts), self.n_pieces)

    def join(self, left: SubAssembly, right: SubAssembly) -> Self:
        """Replace two parts by their union (assembly)."""
        if left not in self.parts or right not in self.parts or left == right:
            raise InvalidAssemblyError(
                f"cannot join {pieces_of(left)} and {pieces_of(right)} in {self!r}"
            )
        parts = [p for p in self.parts if p not in (left, right)]
        parts.append(left | right)
        return type(self)(_canonical(parts), self.n_pieces)

    def is_refined_by(self, other: "Configuration") -> bool:
        """Whether every part of `self` is a union of parts of `other`."""
        return all(is_union_of(p, other.parts) for p in self.parts)


def is_union_of(mask: SubAssembly, parts: Sequence[SubAssembly]) -> bool:
    for g in parts:
        if g & mask and g & ~mask:
            return False
    return True


def _canonical(parts: Iterable[SubAssembly]) -> Tuple[SubAssembly, ...]:
    return tuple(sorted(parts, key=lambda p: p & -p))


@dataclass(frozen=True)
class Worker:
    """A worker of the cell.

    Attributes
    ----------
    name : str
    kind : "human" | "robot"
    cost : float, optional
        Constant hyper-arc cost, robots only.
    """

    name: str
    kind: WorkerKind
    cost: float | None = None

    def is_human(self) -> bool:
        return self.kind == "human"


def make_workers(
    n: int, *, human: bool = True, robot_cost: float = 50.0
) -> List[Worker]:
    """Generic worker list, one human first then robots."""
    if n < 1:
        raise InvalidAssemblyError("at least one agent is required")

    workers = [Worker("human", "human")] if human else []
    n_robots = n - len(workers)
    for i in range(n_robots):
        name = f"robot{i}" if n_robots > 1 else "robot"
        workers.append(Worker(name, "robot", robot_cost))
    return workers


def check_workers(workers: Sequence[Worker]) -> None:
    if len(workers) == 0:
        raise InvalidAssemblyError("at least one agent is required")

    names = [w.name for w in workers]
    if len(set(names)) != len(names):
        raise InvalidAssemblyError(f"duplicated worker names: {names}")

    if sum(w.is_human() for w in workers) > 1:
        raise InvalidAssemblyError("only one human worker is supported")


def union_all(parts: Iterable[SubAssembly]) -> SubAssembly:
    return reduce(lambda a, b: a | b, parts, 0)
