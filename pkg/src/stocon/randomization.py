"""Randomized equivalences and the Kleisli extension of a relation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .congruence import block_masses
from .core import SubDistribution
from .errors import PreconditionViolated
from .partition import BasePartition

__all__ = ["RandomFriendReport", "kleisli_extension", "rnd_equivalent", "is_random_friend"]


def _codomain(rows: Mapping):
    spaces = {d.space for d in rows.values()}
    if len(spaces) != 1:
        raise PreconditionViolated("rows do not share one codomain")
    return spaces.pop()


def kleisli_extension(rows: Mapping, mu: SubDistribution) -> SubDistribution:
    """``K*(mu) = sum_x mu(x) K(x)``."""
    for x, _ in mu.items():
        if x not in rows:
            raise PreconditionViolated(f"relation has no row for {x!r}")
    target = _codomain(rows)
    acc: dict = {}
    for x, m in mu.items():
        for h, p in rows[x].items():
            acc[h] = acc.get(h, 0) + m * p
    return SubDistribution(target, acc)


def rnd_equivalent(mu: SubDistribution, nu: SubDistribution, xi: BasePartition) -> bool:
    """Equal mass on every ``xi``-invariant set, i.e. on every block."""
    if mu.space != xi.space or nu.space != xi.space:
        raise PreconditionViolated("distributions and partition live on different spaces")
    return block_masses(mu, xi) == block_masses(nu, xi)


@dataclass(frozen=True)
class RandomFriendReport:
    friendly: bool
    witness: tuple[SubDistribution, SubDistribution] | None = None

    def __bool__(self) -> bool:
        return self.friendly


def is_random_friend(rows: Mapping, xi: BasePartition, zeta: BasePartition) -> RandomFriendReport:
    """Decide whether ``K*`` maps ``rnd(xi)``-equivalent laws to ``rnd(zeta)``-equivalent ones.

    ``K*`` is linear and any two laws with equal ``xi``-block masses differ
    by a combination of point-mass differences inside blocks, so checking
    ``delta_x`` against ``delta_x'`` for neighbouring members of each
    block is exact.
    """
    for x in xi.space:
        if x not in rows:
            raise PreconditionViolated(f"relation has no row for {x!r}")
    if _codomain(rows) != zeta.space:
        raise PreconditionViolated("rows are not over the space of zeta")
    for block in xi.blocks:
        for x, x2 in zip(block, block[1:]):
            dx = SubDistribution.point(xi.space, x)
            dx2 = SubDistribution.point(xi.space, x2)
            if not rnd_equivalent(kleisli_extension(rows, dx), kleisli_extension(rows, dx2), zeta):
                return RandomFriendReport(False, (dx, dx2))
    return RandomFriendReport(True)
