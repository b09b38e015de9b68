"""Factor automata, em-factorization and two-step factoring."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .congruence import (
    CongruenceTriple,
    compose_congruences,
    is_congruence,
    kernel_congruence,
    require_congruence,
)
from .core import FiniteSpace, Morphism, ProductSpace, StochasticAutomaton, push_forward
from .errors import InternalConsistencyFailure, PreconditionViolated, StageDecompositionFailed
from .partition import Partition, QuotientSpace, quotient, transport_partition

__all__ = [
    "FactorResult",
    "factor_automaton",
    "em_factorization",
    "refactor_isomorphism",
    "stepwise_reduction",
    "relabel_automaton",
    "fibres",
]

STATES_FIRST = "states-first"
IO_FIRST = "io-first"


def fibres(m: Mapping, target: FiniteSpace) -> dict:
    """``{target label: [preimage labels]}`` in target order."""
    out = {t: [] for t in target}
    for e, t in m.items():
        out[t].append(e)
    return out


@dataclass(frozen=True, eq=False)
class FactorResult:
    factor: StochasticAutomaton
    canonical: Morphism
    stages: tuple = ()

    def classes(self) -> dict:
        """Members of every class, per component."""
        m, k = self.canonical, self.factor
        return {
            "inputs": fibres(m.f, k.inputs),
            "outputs": fibres(m.g, k.outputs),
            "states": fibres(m.h, k.states),
        }


def factor_automaton(a: StochasticAutomaton, c: CongruenceTriple) -> FactorResult:
    """Build the automaton on the class spaces induced by the congruence ``c``.

    Each factor row is the push-forward of the row of the least
    representative; every other representative is re-checked.
    """
    require_congruence(a, c)
    qa, qb, qg = quotient(c.alpha), quotient(c.beta), quotient(c.gamma)
    factor_next = (qg.classes, qb.classes)

    def project(pair):
        return (qg.eta[pair[0]], qb.eta[pair[1]])

    target = ProductSpace(factor_next)
    law = {}
    for xs, xl in zip(c.alpha.blocks, qa.classes):
        for zs, zl in zip(c.gamma.blocks, qg.classes):
            row = push_forward(a.row(xs[0], zs[0]), project, target)
            for x in xs:
                for z in zs:
                    if push_forward(a.row(x, z), project, target) != row:
                        raise InternalConsistencyFailure(f"factor row for ({xl}, {zl}) depends on the representative")
            law[(xl, zl)] = row
    factor = StochasticAutomaton(qa.classes, qb.classes, qg.classes, law)
    canonical = Morphism(a, factor, qa.eta, qb.eta, qg.eta)
    if not canonical.check():
        raise InternalConsistencyFailure("canonical projection is not a morphism")
    return FactorResult(factor, canonical)


def em_factorization(m: Morphism) -> tuple[Morphism, Morphism]:
    """Split ``m`` into the projection onto its kernel factor and an injective rest."""
    kc = kernel_congruence(m)
    fr = factor_automaton(m.source, kc)
    k = fr.factor
    mono = Morphism(
        k,
        m.target,
        {label: m.f[members[0]] for label, members in fibres(fr.canonical.f, k.inputs).items()},
        {label: m.g[members[0]] for label, members in fibres(fr.canonical.g, k.outputs).items()},
        {label: m.h[members[0]] for label, members in fibres(fr.canonical.h, k.states).items()},
    )
    if not mono.check():
        raise InternalConsistencyFailure("induced map on the kernel factor is not a morphism")
    if not fr.canonical.then(mono).same_maps(m):
        raise InternalConsistencyFailure("em-factorization does not reproduce the morphism")
    return fr.canonical, mono


def relabel_automaton(a: StochasticAutomaton, f: Mapping, g: Mapping, h: Mapping, spaces) -> StochasticAutomaton:
    """Rename labels along bijections; ``spaces`` gives the new (X, Y, Z)."""
    inputs, outputs, states = spaces
    nxt = ProductSpace((states, outputs))
    law = {
        (f[x], h[z]): push_forward(a.row(x, z), lambda p: (h[p[0]], g[p[1]]), nxt)
        for x in a.inputs
        for z in a.states
    }
    return StochasticAutomaton(inputs, outputs, states, law)


def _invert(m: Mapping) -> dict:
    inv = {v: k for k, v in m.items()}
    if len(inv) != len(m):
        raise InternalConsistencyFailure("canonical class map is not a bijection")
    return inv


def _class_map(outer: QuotientSpace, first: Mapping, second: Mapping) -> dict:
    # [x]_{xi*zeta} -> [[x]_xi]_zeta, evaluated on the least member of each class
    return {label: second[first[outer.members(label)[0]]] for label in outer.classes}


def refactor_isomorphism(
    a: StochasticAutomaton, c: CongruenceTriple, c_prime: CongruenceTriple
) -> tuple[Morphism, Morphism]:
    """Isomorphism between factoring once by ``c * c'`` and factoring twice.

    Returns ``(forward, backward)`` where ``forward`` goes from the one-step
    factor to the two-step factor.
    """
    first = factor_automaton(a, c)
    composite = compose_congruences(a, c, c_prime)
    one_step = factor_automaton(a, composite)
    two_step = factor_automaton(first.factor, c_prime)

    qs = [quotient(composite.alpha), quotient(composite.beta), quotient(composite.gamma)]
    firsts = [first.canonical.f, first.canonical.g, first.canonical.h]
    seconds = [two_step.canonical.f, two_step.canonical.g, two_step.canonical.h]
    fwd = [_class_map(q, m1, m2) for q, m1, m2 in zip(qs, firsts, seconds)]
    bwd = [_invert(m) for m in fwd]

    forward = Morphism(one_step.factor, two_step.factor, *fwd)
    backward = Morphism(two_step.factor, one_step.factor, *bwd)
    for iso in (forward, backward):
        if not iso.check():
            raise InternalConsistencyFailure("canonical bijection is not a morphism")
    if not forward.then(backward).same_maps(Morphism.identity(one_step.factor)):
        raise InternalConsistencyFailure("bijections are not mutually inverse")
    if not backward.then(forward).same_maps(Morphism.identity(two_step.factor)):
        raise InternalConsistencyFailure("bijections are not mutually inverse")
    return forward, backward


def _stage_triples(a: StochasticAutomaton, c: CongruenceTriple, order: str):
    one_x, one_y, one_z = (Partition.discrete(s) for s in (a.inputs, a.outputs, a.states))
    if order == STATES_FIRST:
        return CongruenceTriple(one_x, one_y, c.gamma), lambda: CongruenceTriple(
            transport_partition(c.alpha, one_x),
            transport_partition(c.beta, one_y),
            Partition.discrete(quotient(c.gamma).classes),
        )
    if order == IO_FIRST:
        return CongruenceTriple(c.alpha, c.beta, one_z), lambda: CongruenceTriple(
            Partition.discrete(quotient(c.alpha).classes),
            Partition.discrete(quotient(c.beta).classes),
            transport_partition(c.gamma, one_z),
        )
    raise PreconditionViolated(f"unknown order {order!r}; use {STATES_FIRST} or {IO_FIRST}")


def stepwise_reduction(a: StochasticAutomaton, c: CongruenceTriple, order: str = STATES_FIRST) -> FactorResult:
    """Factor by ``c`` in two stages: states then inputs/outputs, or the reverse.

    The result's canonical morphism is the composite of both stage
    projections; it is checked to be isomorphic to direct factoring.
    """
    require_congruence(a, c)
    s1, make_s2 = _stage_triples(a, c, order)
    report = is_congruence(a, s1)
    if not report:
        raise StageDecompositionFailed(f"stage one triple is not a congruence ({order})", 1, report)
    fr1 = factor_automaton(a, s1)
    s2 = make_s2()
    report = is_congruence(fr1.factor, s2)
    if not report:
        raise StageDecompositionFailed(f"stage two triple is not a congruence ({order})", 2, report)
    fr2 = factor_automaton(fr1.factor, s2)

    if compose_congruences(a, s1, s2) != c:
        raise InternalConsistencyFailure("stages do not recompose to the original congruence")
    refactor_isomorphism(a, s1, s2)
    return FactorResult(fr2.factor, fr1.canonical.then(fr2.canonical), (s1, s2))
