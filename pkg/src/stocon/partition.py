"""Partitions of finite spaces, quotients and the lifting operation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .core import FiniteSpace, ProductSpace
from .errors import MalformedInput, PreconditionViolated

__all__ = [
    "Partition",
    "ProductPartition",
    "product_partition",
    "power_partition",
    "kernel_partition",
    "QuotientSpace",
    "quotient",
    "class_label",
    "lift_partition",
    "transport_partition",
]


class BasePartition:
    """Shared behaviour of explicit and product partitions."""

    @property
    def blocks(self) -> tuple:
        raise NotImplementedError

    def block_of(self, e) -> int:
        raise NotImplementedError

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def block(self, i: int) -> tuple:
        return self.blocks[i]

    def equivalent(self, a, b) -> bool:
        return self.block_of(a) == self.block_of(b)

    def refines(self, other: BasePartition) -> bool:
        """True iff every block of ``self`` lies inside one block of ``other``."""
        if other.space != self.space:
            return False
        return all(len({other.block_of(e) for e in b}) == 1 for b in self.blocks)

    @property
    def is_discrete(self) -> bool:
        return self.num_blocks == len(self.space)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BasePartition):
            return NotImplemented
        return self.space == other.space and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash((self.space, self.blocks))

    def __repr__(self) -> str:
        inner = ", ".join("{" + ", ".join(map(str, b)) + "}" for b in self.blocks)
        return f"Partition[{self.space.name}]({inner})"


class Partition(BasePartition):
    """An equivalence relation on a finite space, stored as its blocks.

    Blocks are kept canonical: members sorted by space order, blocks
    sorted by their least member.
    """

    def __init__(self, space, blocks: Iterable[Iterable]):
        index = {}
        canon = []
        for b in blocks:
            members = sorted(set(b), key=space.key) if b else []
            if not members:
                raise MalformedInput(f"empty block in partition of {space.name}")
            for e in members:
                if e in index:
                    raise MalformedInput(f"label {e!r} occurs in two blocks of {space.name}")
                index[e] = None
            canon.append(tuple(members))
        missing = [e for e in space if e not in index]
        if missing:
            raise MalformedInput(f"partition of {space.name} does not cover {missing[0]!r}")
        canon.sort(key=lambda b: space.key(b[0]))
        for i, b in enumerate(canon):
            for e in b:
                index[e] = i
        self.space = space
        self._blocks = tuple(canon)
        self._index = index

    @classmethod
    def discrete(cls, space) -> Partition:
        return cls(space, [[e] for e in space])

    @classmethod
    def one_block(cls, space) -> Partition:
        return cls(space, [list(space)])

    @classmethod
    def from_key(cls, space, key) -> Partition:
        """Group the elements of ``space`` by ``key(e)``."""
        groups: dict = {}
        for e in space:
            groups.setdefault(key(e), []).append(e)
        return cls(space, groups.values())

    @property
    def blocks(self) -> tuple:
        return self._blocks

    def block_of(self, e) -> int:
        try:
            return self._index[e]
        except KeyError:
            raise PreconditionViolated(f"{e!r} is not in {self.space.name}") from None


class ProductPartition(BasePartition):
    """Componentwise equivalence on a product space.

    Blocks are the rectangles of factor blocks; they are numbered in mixed
    radix so that the numbering agrees with the canonical (least member)
    order, and are only enumerated on demand.
    """

    def __init__(self, factors: Iterable[BasePartition]):
        self.factors = tuple(factors)
        self.space = ProductSpace(p.space for p in self.factors)

    @property
    def num_blocks(self) -> int:
        n = 1
        for p in self.factors:
            n *= p.num_blocks
        return n

    def block_of(self, e) -> int:
        if not isinstance(e, tuple) or len(e) != len(self.factors):
            raise PreconditionViolated(f"{e!r} is not in {self.space.name}")
        i = 0
        for p, c in zip(self.factors, e):
            i = i * p.num_blocks + p.block_of(c)
        return i

    def block(self, i: int) -> tuple:
        parts = []
        for p in reversed(self.factors):
            i, r = divmod(i, p.num_blocks)
            parts.append(p.block(r))
        return tuple(itertools.product(*reversed(parts)))

    @cached_property
    def blocks(self) -> tuple:
        return tuple(self.block(i) for i in range(self.num_blocks))

    @property
    def is_discrete(self) -> bool:
        return all(p.is_discrete for p in self.factors)


def product_partition(*parts: BasePartition) -> ProductPartition:
    return ProductPartition(parts)


def power_partition(p: BasePartition, n: int) -> ProductPartition:
    """``p`` extended componentwise to words of length ``n``."""
    if n < 1:
        raise PreconditionViolated("power must be at least 1")
    return ProductPartition((p,) * n)


def kernel_partition(m: Mapping, space) -> Partition:
    """The nonempty fibres of the total map ``m`` on ``space``."""
    for e in space:
        if e not in m:
            raise PreconditionViolated(f"map undefined on {e!r}")
    return Partition.from_key(space, lambda e: m[e])


def class_label(block: tuple) -> str:
    return f"⟨{block[0]}⟩"


@dataclass(frozen=True, eq=False)
class QuotientSpace:
    base: FiniteSpace
    partition: Partition
    classes: FiniteSpace
    eta: Mapping

    def members(self, label) -> tuple:
        return self.partition.blocks[self.classes.key(label)]


def quotient(p: Partition) -> QuotientSpace:
    """The class space ``F/p`` with its canonical projection.

    Classes are named after their least member as ``⟨least⟩``.
    """
    if not isinstance(p.space, FiniteSpace):
        raise PreconditionViolated("only partitions of plain finite spaces have named quotients")
    labels = [class_label(b) for b in p.blocks]
    classes = FiniteSpace(p.space.name, labels)
    eta = {e: labels[i] for i, b in enumerate(p.blocks) for e in b}
    return QuotientSpace(p.space, p, classes, eta)


def lift_partition(xi: Partition, zeta: Partition) -> Partition:
    """Pull a partition of ``F/xi`` back to ``F``: ``x ~ x'`` iff their classes are ``zeta``-related."""
    q = quotient(xi)
    if zeta.space != q.classes:
        raise PreconditionViolated(f"partition is not over the class space of {xi!r}")
    return Partition(xi.space, [[e for label in zb for e in q.members(label)] for zb in zeta.blocks])


def transport_partition(p: Partition, xi: Partition) -> Partition:
    """Image of ``p`` on ``F/xi``; ``p`` must be coarser than ``xi``."""
    if not xi.refines(p):
        raise PreconditionViolated("partition is not coarser than the quotient relation")
    q = quotient(xi)
    return Partition(q.classes, [sorted({q.eta[e] for e in b}, key=q.classes.key) for b in p.blocks])
