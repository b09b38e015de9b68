"""Friendship of equivalence relations and automaton congruences.

On a finite space the invariant sets of a partition are exactly the
unions of its blocks, so a measure restricted to the invariant sets is
determined by its vector of block masses.  Friendship therefore reduces
to comparing block-mass vectors of equivalent points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .core import Morphism, StochasticAutomaton, SubDistribution
from .errors import InternalConsistencyFailure, NotACongruence, NotAMorphism, PreconditionViolated
from .partition import BasePartition, Partition, kernel_partition, lift_partition, product_partition

__all__ = [
    "FriendshipWitness",
    "FriendshipReport",
    "CongruenceTriple",
    "block_masses",
    "invariant_mass",
    "is_friendly",
    "is_congruence",
    "require_congruence",
    "coarsest_state_congruence",
    "compose_congruences",
    "kernel_congruence",
]


@dataclass(frozen=True)
class FriendshipWitness:
    first: object
    second: object
    block: tuple
    first_mass: Fraction
    second_mass: Fraction


@dataclass(frozen=True)
class FriendshipReport:
    friendly: bool
    witness: FriendshipWitness | None = None

    def __bool__(self) -> bool:
        return self.friendly


@dataclass(frozen=True)
class CongruenceTriple:
    alpha: Partition
    beta: Partition
    gamma: Partition

    @classmethod
    def discrete(cls, a: StochasticAutomaton) -> CongruenceTriple:
        return cls(Partition.discrete(a.inputs), Partition.discrete(a.outputs), Partition.discrete(a.states))

    @classmethod
    def one_block(cls, a: StochasticAutomaton) -> CongruenceTriple:
        return cls(Partition.one_block(a.inputs), Partition.one_block(a.outputs), Partition.one_block(a.states))

    def check_spaces(self, a: StochasticAutomaton) -> None:
        for name, p, space in (
            ("alpha", self.alpha, a.inputs),
            ("beta", self.beta, a.outputs),
            ("gamma", self.gamma, a.states),
        ):
            if p.space != space:
                raise PreconditionViolated(f"{name} does not partition {space.name}")

    def refines(self, other: CongruenceTriple) -> bool:
        return self.alpha.refines(other.alpha) and self.beta.refines(other.beta) and self.gamma.refines(other.gamma)


def block_masses(d: SubDistribution, theta: BasePartition) -> dict:
    """Sparse block-mass vector ``{block index: mass}`` (zero entries omitted)."""
    acc: dict = {}
    for e, w in d.items():
        i = theta.block_of(e)
        acc[i] = acc.get(i, 0) + w
    return {i: w for i, w in acc.items() if w != 0}


def invariant_mass(d: SubDistribution, theta: BasePartition) -> list[Fraction]:
    """Mass of every block of ``theta`` under ``d``, in canonical block order."""
    if d.space != theta.space:
        raise PreconditionViolated("distribution and partition live on different spaces")
    sparse = block_masses(d, theta)
    return [sparse.get(i, Fraction(0)) for i in range(theta.num_blocks)]


def _first_difference(m1: dict, m2: dict) -> int | None:
    diff = [i for i in set(m1) | set(m2) if m1.get(i, 0) != m2.get(i, 0)]
    return min(diff) if diff else None


def is_friendly(rows: Mapping, xi: BasePartition, theta: BasePartition) -> FriendshipReport:
    """Decide whether ``xi`` is friendly to ``theta`` for the relation ``rows``.

    Equivalent points must put equal mass on every block of ``theta``;
    by transitivity it suffices to compare consecutive members of each
    ``xi`` block.  The witness is the first failing pair in canonical
    order together with the first separating block.
    """
    for e in xi.space:
        if e not in rows:
            raise PreconditionViolated(f"relation has no row for {e!r}")
        if rows[e].space != theta.space:
            raise PreconditionViolated(f"row for {e!r} is not over {theta.space.name}")
    for block in xi.blocks:
        prev = block[0]
        prev_masses = block_masses(rows[prev], theta)
        for e in block[1:]:
            masses = block_masses(rows[e], theta)
            i = _first_difference(prev_masses, masses)
            if i is not None:
                witness = FriendshipWitness(
                    prev, e, theta.block(i), prev_masses.get(i, Fraction(0)), masses.get(i, Fraction(0))
                )
                return FriendshipReport(False, witness)
            prev, prev_masses = e, masses
    return FriendshipReport(True)


def is_congruence(a: StochasticAutomaton, c: CongruenceTriple) -> FriendshipReport:
    """``alpha x gamma`` friendly to ``gamma x beta`` for the transition law."""
    c.check_spaces(a)
    xi = product_partition(c.alpha, c.gamma)
    theta = product_partition(c.gamma, c.beta)
    return is_friendly(a.law, xi, theta)


def require_congruence(a: StochasticAutomaton, c: CongruenceTriple) -> None:
    report = is_congruence(a, c)
    if not report:
        raise NotACongruence(f"not a congruence: {report.witness}", report)


def coarsest_state_congruence(
    a: StochasticAutomaton,
    alpha: Partition | None = None,
    beta: Partition | None = None,
    seed: Partition | None = None,
) -> Partition:
    """Coarsest state partition below ``seed`` completing ``(alpha, beta, .)`` to a congruence.

    Partition refinement: every round splits each block by the signature
    ``x -> block masses of K(x, z)`` w.r.t. the current ``gamma x beta``,
    until nothing splits.  Any admissible partition stays below every
    round, so the fixed point is the coarsest candidate; if it still fails
    (inputs merged by ``alpha`` disagree even at a single state) no
    admissible partition exists and :class:`NotACongruence` is raised.
    """
    alpha = alpha if alpha is not None else Partition.discrete(a.inputs)
    beta = beta if beta is not None else Partition.discrete(a.outputs)
    gamma = seed if seed is not None else Partition.one_block(a.states)
    CongruenceTriple(alpha, beta, gamma).check_spaces(a)

    while True:
        theta = product_partition(gamma, beta)

        def signature(z):
            return tuple(tuple(sorted(block_masses(a.row(x, z), theta).items())) for x in a.inputs)

        refined = Partition(
            a.states,
            [part for b in gamma.blocks for part in _split(b, signature)],
        )
        if refined.num_blocks == gamma.num_blocks:
            break
        gamma = refined

    report = is_congruence(a, CongruenceTriple(alpha, beta, gamma))
    if not report:
        raise NotACongruence("no state partition makes this a congruence", report)
    return gamma


def _split(block: tuple, key) -> list[list]:
    groups: dict = {}
    for e in block:
        groups.setdefault(key(e), []).append(e)
    return list(groups.values())


def compose_congruences(
    a: StochasticAutomaton, c: CongruenceTriple, c_prime: CongruenceTriple
) -> CongruenceTriple:
    """Lift a congruence of the factor automaton back to ``a`` componentwise."""
    from .factor import factor_automaton

    fr = factor_automaton(a, c)
    inner = is_congruence(fr.factor, c_prime)
    if not inner:
        raise NotACongruence("second triple is not a congruence on the factor", inner)
    lifted = CongruenceTriple(
        lift_partition(c.alpha, c_prime.alpha),
        lift_partition(c.beta, c_prime.beta),
        lift_partition(c.gamma, c_prime.gamma),
    )
    if not is_congruence(a, lifted):
        raise InternalConsistencyFailure("lifted triple is not a congruence")
    return lifted


def kernel_congruence(m: Morphism) -> CongruenceTriple:
    res = m.check()
    if not res:
        raise NotAMorphism(f"diagram fails at {res.counterexample}", res.counterexample)
    a = m.source
    triple = CongruenceTriple(
        kernel_partition(m.f, a.inputs),
        kernel_partition(m.g, a.outputs),
        kernel_partition(m.h, a.states),
    )
    if not is_congruence(a, triple):
        raise InternalConsistencyFailure("kernel of a morphism is not a congruence")
    return triple
