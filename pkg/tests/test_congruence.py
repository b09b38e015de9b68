import random
from fractions import Fraction as Q

import oracles
import pytest
from conftest import build_a0, make_automaton
from instances import blocks_of, relation_instance, table_of

from stocon import (
    CongruenceTriple,
    FiniteSpace,
    InternalConsistencyFailure,
    MalformedInput,
    Morphism,
    NotACongruence,
    NotAMorphism,
    Partition,
    PreconditionViolated,
    ProductSpace,
    SubDistribution,
    coarsest_state_congruence,
    compose_congruences,
    factor_automaton,
    invariant_mass,
    is_congruence,
    is_friendly,
    kernel_congruence,
    kernel_partition,
    lift_partition,
    power_partition,
    product_partition,
    quotient,
)
from stocon.generate import morphism_instance, planted_automaton, random_automaton

UVW = FiniteSpace("F", "uvw")
PQ = FiniteSpace("H", "pq")


# -- partitions --------------------------------------------------------------------


def test_partition_canonical_form():
    p = Partition(UVW, [["w"], ["v", "u"]])
    assert p.blocks == (("u", "v"), ("w",))
    assert p == Partition(UVW, [["u", "v"], ["w"]])


@pytest.mark.parametrize("blocks", [[["u"], ["u", "v", "w"]], [["u"], ["v"]], [["u", "v", "w"], []]])
def test_partition_must_cover_disjointly(blocks):
    with pytest.raises(MalformedInput):
        Partition(UVW, blocks)


def test_refinement_order():
    assert Partition.discrete(UVW).refines(Partition(UVW, [["u", "v"], ["w"]]))
    assert not Partition.one_block(UVW).refines(Partition.discrete(UVW))


def test_product_of_discretes_is_discrete():
    pp = product_partition(Partition.discrete(UVW), Partition.discrete(PQ))
    assert pp.num_blocks == 6 and pp.is_discrete


def test_product_of_one_blocks_is_one_block():
    pp = product_partition(Partition.one_block(UVW), Partition.one_block(PQ))
    assert pp.num_blocks == 1 and len(pp.block(0)) == 6


def test_product_blocks_are_rectangles():
    Z, Y = FiniteSpace("states", "st"), FiniteSpace("outputs", "01")
    pp = product_partition(Partition(Z, [["s", "t"]]), Partition.discrete(Y))
    assert pp.blocks == ((("s", "0"), ("t", "0")), (("s", "1"), ("t", "1")))


def test_power_partition():
    Y = FiniteSpace("outputs", "01")
    assert power_partition(Partition.discrete(Y), 3).is_discrete
    assert power_partition(Partition.one_block(Y), 2).num_blocks == 1
    square = power_partition(Partition(Y, [["0", "1"]]), 2)
    assert square.blocks == ((("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")),)


def test_kernel_partition_examples():
    assert kernel_partition({e: e for e in UVW}, UVW).is_discrete
    assert kernel_partition({e: 0 for e in UVW}, UVW).num_blocks == 1
    assert kernel_partition({"u": "p", "v": "p", "w": "q"}, UVW) == Partition(UVW, [["u", "v"], ["w"]])


def test_lifting():
    xi = Partition.discrete(UVW)
    q = quotient(xi)
    assert lift_partition(xi, Partition.discrete(q.classes)) == xi
    assert lift_partition(xi, Partition.one_block(q.classes)) == Partition.one_block(UVW)
    merged = Partition(q.classes, [["⟨u⟩", "⟨v⟩"], ["⟨w⟩"]])
    assert lift_partition(xi, merged) == Partition(UVW, [["u", "v"], ["w"]])


def test_lifting_over_wrong_class_space():
    with pytest.raises(PreconditionViolated):
        lift_partition(Partition.discrete(UVW), Partition.discrete(PQ))


# -- invariant mass and friendship ---------------------------------------------------


def test_invariant_mass_examples():
    UV = FiniteSpace("F", "uv")
    assert invariant_mass(SubDistribution(UV, {"u": Q(1, 2), "v": Q(1, 2)}), Partition.one_block(UV)) == [1]
    assert invariant_mass(SubDistribution(UVW, {"u": Q(1, 3)}), Partition.discrete(UVW)) == [Q(1, 3), 0, 0]
    d = SubDistribution(UVW, {"u": Q(1, 4), "v": Q(1, 2), "w": Q(1, 8)})
    assert invariant_mass(d, Partition(UVW, [["u", "v"], ["w"]])) == [Q(3, 4), Q(1, 8)]


def test_invariant_mass_space_mismatch():
    with pytest.raises(PreconditionViolated):
        invariant_mass(SubDistribution(UVW, {}), Partition.discrete(PQ))


def test_discrete_xi_is_always_friendly():
    rows = {"u": SubDistribution(PQ, {"p": 1}), "v": SubDistribution(PQ, {"q": 1}), "w": SubDistribution(PQ, {})}
    assert is_friendly(rows, Partition.discrete(UVW), Partition.discrete(PQ))


def test_a0_rows_at_one_input_are_friendly(a0):
    rows = {z: a0.row("a", z) for z in a0.states}
    theta = product_partition(Partition.discrete(a0.states), Partition.discrete(a0.outputs))
    assert theta.is_discrete
    assert is_friendly(rows, Partition(a0.states, [["s", "t"]]), theta)


def test_point_masses_on_different_blocks_are_not_friendly():
    UV = FiniteSpace("F", "uv")
    rows = {"u": SubDistribution(PQ, {"p": 1}), "v": SubDistribution(PQ, {"q": 1})}
    report = is_friendly(rows, Partition.one_block(UV), Partition.discrete(PQ))
    assert not report
    w = report.witness
    assert (w.first, w.second, w.block, w.first_mass, w.second_mass) == ("u", "v", ("p",), 1, 0)


def test_friendship_requires_total_rows():
    with pytest.raises(PreconditionViolated):
        is_friendly({"u": SubDistribution(PQ, {})}, Partition.one_block(UVW), Partition.discrete(PQ))


@pytest.mark.parametrize("seed", range(40))
def test_friendship_matches_enumeration_of_invariant_sets(seed):
    rows, xi, theta = relation_instance(random.Random(seed))
    plain = {x: dict(d.items()) for x, d in rows.items()}
    assert bool(is_friendly(rows, xi, theta)) == oracles.friendly(plain, blocks_of(xi), blocks_of(theta))


@pytest.mark.parametrize("seed", range(20))
def test_friendship_witness_separates(seed):
    rows, xi, theta = relation_instance(random.Random(seed), planted=False)
    report = is_friendly(rows, xi, theta)
    if report:
        return
    w = report.witness
    assert xi.equivalent(w.first, w.second)
    assert w.first_mass != w.second_mass
    assert rows[w.first].measure(w.block) == w.first_mass
    assert rows[w.second].measure(w.block) == w.second_mass


# -- congruences --------------------------------------------------------------------------


def test_discrete_triple_is_a_congruence(a0):
    assert is_congruence(a0, CongruenceTriple.discrete(a0))


def test_merging_a0_states_is_a_congruence(a0, a0_states):
    assert is_congruence(a0, a0_states)


def test_broken_a0_is_not_a_congruence(a0_states):
    broken = build_a0({("b", "t"): {("t", "0"): Q(1)}})
    report = is_congruence(broken, a0_states)
    assert not report
    w = report.witness
    assert (w.first, w.second) == (("b", "s"), ("b", "t"))
    # both rectangles {s,t}x{0} and {s,t}x{1} separate the pair; the first in canonical order is reported
    assert w.block == (("s", "0"), ("t", "0"))
    assert (w.first_mass, w.second_mass) == (0, 1)
    other = (("s", "1"), ("t", "1"))
    assert broken.row("b", "s").measure(other) == 1 and broken.row("b", "t").measure(other) == 0


def test_congruence_space_mismatch(a0):
    wrong = CongruenceTriple(Partition.discrete(a0.outputs), Partition.discrete(a0.outputs), Partition.discrete(a0.states))
    with pytest.raises(PreconditionViolated):
        is_congruence(a0, wrong)


def test_coarsest_on_a0(a0):
    assert coarsest_state_congruence(a0) == Partition(a0.states, [["s", "t"]])


def test_coarsest_separates_states_with_different_outputs():
    a = make_automaton("a", "01", "st", {("a", "s"): {("s", "0"): Q(1)}, ("a", "t"): {("t", "1"): Q(1)}})
    assert coarsest_state_congruence(a).is_discrete


def test_coarsest_of_discrete_seed_is_discrete(a0):
    assert coarsest_state_congruence(a0, seed=Partition.discrete(a0.states)).is_discrete


def test_coarsest_raises_when_inputs_cannot_be_merged(a0):
    with pytest.raises(NotACongruence):
        coarsest_state_congruence(a0, alpha=Partition.one_block(a0.inputs))


@pytest.mark.parametrize("seed", range(15))
def test_coarsest_matches_enumeration_of_partitions(seed):
    rng = random.Random(seed)
    a, fine, _ = planted_automaton(rng, 2, 2, 4)
    alpha, beta = fine.alpha, fine.beta
    table = table_of(a)
    admissible, top = oracles.coarsest_congruence(table, list(a.states), blocks_of(alpha), blocks_of(beta), [list(a.states)])
    assert len(top) == 1
    got = coarsest_state_congruence(a, alpha, beta)
    assert got == Partition(a.states, top[0])


def test_splitter_order_does_not_matter():
    rng = random.Random(7)
    for _ in range(10):
        a, fine, _ = planted_automaton(rng, 2, 2, 5)
        reversed_a = make_automaton(
            list(a.inputs)[::-1], list(a.outputs), list(a.states), {k: dict(v.items()) for k, v in a.rows().items()}
        )
        g1 = coarsest_state_congruence(a, Partition.discrete(a.inputs), fine.beta)
        g2 = coarsest_state_congruence(reversed_a, Partition.discrete(reversed_a.inputs), Partition(reversed_a.outputs, fine.beta.blocks))
        assert g1.blocks == g2.blocks


# -- lifting congruences ------------------------------------------------------------------


def test_compose_with_discrete_second_gives_first(a0, a0_states):
    k = factor_automaton(a0, a0_states).factor
    assert compose_congruences(a0, a0_states, CongruenceTriple.discrete(k)) == a0_states


def test_compose_after_discrete_first_gives_second(a0, a0_states):
    disc = CongruenceTriple.discrete(a0)
    k = factor_automaton(a0, disc).factor
    second = CongruenceTriple(
        Partition.discrete(k.inputs), Partition.discrete(k.outputs), Partition(k.states, [["⟨s⟩", "⟨t⟩"]])
    )
    assert compose_congruences(a0, disc, second) == a0_states


def test_compose_merging_outputs_on_a0_factor(a0, a0_states):
    k = factor_automaton(a0, a0_states).factor
    # on the one-state factor both inputs emit one output with certainty, so merging outputs and inputs is legal
    second = CongruenceTriple(Partition.one_block(k.inputs), Partition.one_block(k.outputs), Partition.discrete(k.states))
    lifted = compose_congruences(a0, a0_states, second)
    assert is_congruence(a0, lifted)
    assert lifted == CongruenceTriple.one_block(a0)


def test_compose_rejects_non_congruence_on_factor(a0, a0_states):
    k = factor_automaton(a0, a0_states).factor
    second = CongruenceTriple(Partition.one_block(k.inputs), Partition.discrete(k.outputs), Partition.discrete(k.states))
    with pytest.raises(NotACongruence) as info:
        compose_congruences(a0, a0_states, second)
    assert not info.value.report


# -- kernels -----------------------------------------------------------------------------


def test_kernel_of_identity_is_discrete(a0):
    assert kernel_congruence(Morphism.identity(a0)) == CongruenceTriple.discrete(a0)


def test_kernel_of_a0_projection(a0, a0_states):
    fr = factor_automaton(a0, a0_states)
    assert kernel_congruence(fr.canonical) == a0_states


def test_kernel_rejects_non_morphism(a0):
    other = build_a0({("a", "s"): {("s", "1"): Q(1)}})
    with pytest.raises(NotAMorphism) as info:
        kernel_congruence(Morphism(a0, other, {"a": "a", "b": "b"}, {"0": "0", "1": "1"}, {"s": "s", "t": "t"}))
    assert info.value.counterexample[:2] == ("a", "s")


@pytest.mark.parametrize("seed", range(10))
def test_kernels_are_congruences_by_enumeration(seed):
    m = morphism_instance(random.Random(seed), 3, 3, 3)
    assert oracles.diagram_commutes(table_of(m.source), table_of(m.target), m.f, m.g, m.h)
    k = kernel_congruence(m)
    assert oracles.congruent(table_of(m.source), blocks_of(k.alpha), blocks_of(k.beta), blocks_of(k.gamma))


def test_internal_failure_is_an_assertion():
    assert issubclass(InternalConsistencyFailure, AssertionError)


def test_random_automata_are_mostly_discrete_under_coarsest():
    rng = random.Random(3)
    for _ in range(5):
        a = random_automaton(rng, 2, 2, 3)
        g = coarsest_state_congruence(a)
        assert is_congruence(a, CongruenceTriple(Partition.discrete(a.inputs), Partition.discrete(a.outputs), g))
        assert isinstance(a.next_space, ProductSpace)
