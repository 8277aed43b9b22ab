"""Composable transformations of recorded data."""

from abc import ABC, abstractmethod
from typing import Any, Generic, Iterator, List, TypeVar, cast

__all__ = ["Transform", "Transforms", "Identity"]

T, K = TypeVar("T"), TypeVar("K")


class Transform(ABC, Generic[T, K]):
    """Map from `T` to `K`.

    Subclasses implement :meth:`__call__`. The name given by
    :meth:`__repr__` shows in logs, it must not contain `_`, which
    separates the steps of a chain.
    """

    @abstractmethod
    def __call__(self, x: T) -> K:
        raise NotImplementedError()

    def __repr__(self) -> str:
        return self.__class__.__name__


class Transforms(Transform[T, K]):
    """Chain of transforms applied left to right.

    Nested chains are inlined and identities dropped, so the name of a
    chain only depends on the steps doing work.
    """

    def __init__(self, *transforms: Transform[Any, Any]) -> None:
        self.transforms: List[Transform[Any, Any]] = []
        for t in transforms:
            match t:
                case Transforms():
                    self.transforms.extend(t.transforms)
                case Identity():
                    pass
                case _:
                    self.transforms.append(t)

    def __call__(self, x: T) -> K:
        y: Any = x
        for t in self.transforms:
            y = t(y)
        return cast(K, y)

    def __getitem__(self, idx: int) -> Transform[Any, Any]:
        return self.transforms[idx]

    def __iter__(self) -> Iterator[Transform[Any, Any]]:
        return iter(self.transforms)

    def __len__(self) -> int:
        return len(self.transforms)

    def __repr__(self) -> str:
        return "_".join(repr(t) for t in self.transforms)


class Identity(Transform[T, T]):
    def __call__(self, x: T) -> T:
        return x

    def __repr__(self) -> str:
        return ""
