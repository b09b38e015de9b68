import random
from fractions import Fraction as Q

import pytest
from conftest import make_automaton

from stocon import (
    CongruenceTriple,
    Morphism,
    NotACongruence,
    NotAMorphism,
    Partition,
    PreconditionViolated,
    StageDecompositionFailed,
    em_factorization,
    factor_automaton,
    is_congruence,
    refactor_isomorphism,
    relabel_automaton,
    stepwise_reduction,
)
from stocon.factor import IO_FIRST, STATES_FIRST
from stocon.generate import morphism_instance, planted_automaton, stacked_instance

ONE_STATE = make_automaton("ab", "01", "S", {("a", "S"): {("S", "0"): Q(1)}, ("b", "S"): {("S", "1"): Q(1)}})


def same_up_to_labels(k1, k2, fwd) -> bool:
    f, g, h = fwd
    return relabel_automaton(k1, f, g, h, (k2.inputs, k2.outputs, k2.states)) == k2


def label_bijection(direct, other):
    """Match classes of two factors of the same automaton via their members."""
    maps = []
    for m1, m2 in ((direct.canonical.f, other.canonical.f), (direct.canonical.g, other.canonical.g), (direct.canonical.h, other.canonical.h)):
        pairs = {m1[e]: m2[e] for e in m1}
        assert len(set(pairs.values())) == len(pairs)
        maps.append(pairs)
    return maps


def test_a0_factor_is_one_state(a0, a0_states):
    fr = factor_automaton(a0, a0_states)
    k = fr.factor
    assert list(k.states) == ["⟨s⟩"]
    assert k.row("⟨a⟩", "⟨s⟩").items() == ((("⟨s⟩", "⟨0⟩"), 1),)
    assert k.row("⟨b⟩", "⟨s⟩").items() == ((("⟨s⟩", "⟨1⟩"), 1),)
    assert same_up_to_labels(k, ONE_STATE, ({"⟨a⟩": "a", "⟨b⟩": "b"}, {"⟨0⟩": "0", "⟨1⟩": "1"}, {"⟨s⟩": "S"}))
    assert fr.canonical.check()
    assert fr.classes()["states"] == {"⟨s⟩": ["s", "t"]}


def test_discrete_factor_is_a_relabeling(a0):
    fr = factor_automaton(a0, CongruenceTriple.discrete(a0))
    inv = [{v: k for k, v in m.items()} for m in (fr.canonical.f, fr.canonical.g, fr.canonical.h)]
    assert same_up_to_labels(fr.factor, a0, inv)


def test_one_block_factor_keeps_total_mass(a0):
    k = factor_automaton(a0, CongruenceTriple.one_block(a0)).factor
    assert len(k.rows()) == 1
    assert next(iter(k.rows().values())).mass == 1


def test_factor_requires_congruence(a0):
    bad = CongruenceTriple(Partition.one_block(a0.inputs), Partition.discrete(a0.outputs), Partition.discrete(a0.states))
    with pytest.raises(NotACongruence) as info:
        factor_automaton(a0, bad)
    assert info.value.report.witness is not None


@pytest.mark.parametrize("seed", range(10))
def test_factor_rows_preserve_mass(seed):
    a, fine, _ = planted_automaton(random.Random(seed), 3, 2, 4, full=False)
    fr = factor_automaton(a, fine)
    for x in a.inputs:
        for z in a.states:
            assert fr.factor.row(fr.canonical.f[x], fr.canonical.h[z]).mass == a.row(x, z).mass


def test_em_factorization_of_a0_projection(a0, a0_states):
    m = factor_automaton(a0, a0_states).canonical
    canonical, mono = em_factorization(m)
    assert canonical.target == m.target
    for comp in ("f", "g", "h"):
        assert sorted(getattr(mono, comp).values()) == sorted(set(getattr(mono, comp).values()))
    assert canonical.then(mono).same_maps(m)


def test_em_factorization_of_injective_morphism(a0):
    canonical, mono = em_factorization(Morphism.identity(a0))
    assert canonical.then(mono).same_maps(Morphism.identity(a0))
    assert len(canonical.target.states) == 2


def test_em_factorization_onto_one_point():
    src = make_automaton("ab", "01", "st", {(x, z): {("s", "0"): Q(1, 2), ("t", "1"): Q(1, 2)} for x in "ab" for z in "st"})
    pt = make_automaton("A", "O", "S", {("A", "S"): {("S", "O"): Q(1)}})
    m = Morphism(src, pt, {"a": "A", "b": "A"}, {"0": "O", "1": "O"}, {"s": "S", "t": "S"})
    canonical, mono = em_factorization(m)
    assert len(canonical.target.inputs) == len(canonical.target.states) == 1
    assert mono.check()


def test_em_factorization_rejects_non_morphism(a0):
    with pytest.raises(NotAMorphism):
        em_factorization(Morphism(a0, ONE_STATE, {"a": "b", "b": "a"}, {"0": "0", "1": "1"}, {"s": "S", "t": "S"}))


@pytest.mark.parametrize("seed", range(10))
def test_em_factorization_random(seed):
    m = morphism_instance(random.Random(seed), 4, 3, 4)
    canonical, mono = em_factorization(m)
    assert canonical.check() and mono.check()
    assert canonical.then(mono).same_maps(m)
    for comp in ("f", "g", "h"):
        vals = list(getattr(mono, comp).values())
        assert len(vals) == len(set(vals))


def test_refactor_with_discrete_second(a0, a0_states):
    k = factor_automaton(a0, a0_states).factor
    fwd, bwd = refactor_isomorphism(a0, a0_states, CongruenceTriple.discrete(k))
    assert fwd.h == {"⟨s⟩": "⟨⟨s⟩⟩"}
    assert same_up_to_labels(fwd.source, fwd.target, (fwd.f, fwd.g, fwd.h))


def test_refactor_with_discrete_first(a0, a0_states):
    disc = CongruenceTriple.discrete(a0)
    k = factor_automaton(a0, disc).factor
    second = CongruenceTriple(Partition.discrete(k.inputs), Partition.discrete(k.outputs), Partition.one_block(k.states))
    fwd, bwd = refactor_isomorphism(a0, disc, second)
    assert same_up_to_labels(fwd.source, factor_automaton(a0, a0_states).factor, ({"⟨a⟩": "⟨a⟩", "⟨b⟩": "⟨b⟩"}, {"⟨0⟩": "⟨0⟩", "⟨1⟩": "⟨1⟩"}, {"⟨s⟩": "⟨s⟩"}))
    assert same_up_to_labels(bwd.source, bwd.target, (bwd.f, bwd.g, bwd.h))


def test_refactor_on_a0_merging_outputs(a0, a0_states):
    k = factor_automaton(a0, a0_states).factor
    second = CongruenceTriple(Partition.one_block(k.inputs), Partition.one_block(k.outputs), Partition.discrete(k.states))
    fwd, bwd = refactor_isomorphism(a0, a0_states, second)
    assert same_up_to_labels(fwd.source, fwd.target, (fwd.f, fwd.g, fwd.h))
    assert fwd.then(bwd).same_maps(Morphism.identity(fwd.source))


@pytest.mark.parametrize("seed", range(10))
def test_refactor_random(seed):
    a, c, c_prime = stacked_instance(random.Random(seed), 3, 3, 4)
    fwd, bwd = refactor_isomorphism(a, c, c_prime)
    assert same_up_to_labels(fwd.source, fwd.target, (fwd.f, fwd.g, fwd.h))
    assert same_up_to_labels(bwd.source, bwd.target, (bwd.f, bwd.g, bwd.h))


@pytest.mark.parametrize("order", [STATES_FIRST, IO_FIRST])
def test_stepwise_on_a0_matches_direct(a0, a0_states, order):
    direct = factor_automaton(a0, a0_states)
    fr = stepwise_reduction(a0, a0_states, order)
    assert same_up_to_labels(direct.factor, fr.factor, label_bijection(direct, fr))


def test_stepwise_states_first_with_discrete_gamma_has_identity_stage(a0):
    c = CongruenceTriple(Partition.discrete(a0.inputs), Partition.one_block(a0.outputs), Partition.discrete(a0.states))
    a = make_automaton("ab", "01", "st", {(x, z): {(z, "0"): Q(1, 2), (z, "1"): Q(1, 2)} for x in "ab" for z in "st"})
    assert is_congruence(a, c)
    fr = stepwise_reduction(a, c, STATES_FIRST)
    assert fr.stages[0] == CongruenceTriple.discrete(a)


def test_stepwise_io_first_with_discrete_io_has_identity_stage(a0, a0_states):
    fr = stepwise_reduction(a0, a0_states, IO_FIRST)
    assert fr.stages[0] == CongruenceTriple.discrete(a0)


def test_stepwise_reports_failing_stage():
    # merging inputs is only legal after states are merged
    a = make_automaton(
        "ab",
        "0",
        "st",
        {
            ("a", "s"): {("s", "0"): Q(1)},
            ("a", "t"): {("t", "0"): Q(1)},
            ("b", "s"): {("t", "0"): Q(1)},
            ("b", "t"): {("s", "0"): Q(1)},
        },
    )
    c = CongruenceTriple.one_block(a)
    assert is_congruence(a, c)
    with pytest.raises(StageDecompositionFailed) as info:
        stepwise_reduction(a, c, IO_FIRST)
    assert info.value.stage == 1
    fr = stepwise_reduction(a, c, STATES_FIRST)
    assert len(fr.factor.states) == 1


def test_stepwise_unknown_order(a0, a0_states):
    with pytest.raises(PreconditionViolated):
        stepwise_reduction(a0, a0_states, "sideways")


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("order", [STATES_FIRST, IO_FIRST])
def test_stepwise_random_matches_direct(seed, order):
    a, fine, _ = planted_automaton(random.Random(seed), 3, 3, 4)
    direct = factor_automaton(a, fine)
    fr = stepwise_reduction(a, fine, order)
    assert fr.canonical.check()
    assert same_up_to_labels(direct.factor, fr.factor, label_bijection(direct, fr))
