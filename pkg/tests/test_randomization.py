import random
from fractions import Fraction as Q

import oracles
import pytest
from instances import relation_instance

from stocon import FiniteSpace, Partition, PreconditionViolated, SubDistribution, is_friendly
from stocon.randomization import is_random_friend, kleisli_extension, rnd_equivalent

UV = FiniteSpace("F", "uv")
PQ = FiniteSpace("H", "pq")
ROWS = {"u": SubDistribution(PQ, {"p": 1}), "v": SubDistribution(PQ, {"q": 1})}


def test_point_mass_recovers_row():
    assert kleisli_extension(ROWS, SubDistribution.point(UV, "u")) == ROWS["u"]


def test_zero_maps_to_zero():
    assert kleisli_extension(ROWS, SubDistribution.zero(UV)).mass == 0


def test_convex_combination():
    got = kleisli_extension(ROWS, SubDistribution(UV, {"u": Q(1, 2), "v": Q(1, 2)}))
    assert got == SubDistribution(PQ, {"p": Q(1, 2), "q": Q(1, 2)})


def test_kleisli_missing_row():
    with pytest.raises(PreconditionViolated):
        kleisli_extension({"u": ROWS["u"]}, SubDistribution.point(UV, "v"))


def test_rnd_equivalence_examples():
    half = SubDistribution(UV, {"u": Q(1, 2), "v": Q(1, 2)})
    at_u = SubDistribution(UV, {"u": 1})
    assert rnd_equivalent(half, half, Partition.discrete(UV))
    assert rnd_equivalent(half, at_u, Partition.one_block(UV))
    assert not rnd_equivalent(half, at_u, Partition.discrete(UV))


def test_point_masses_follow_the_partition():
    xi = Partition(FiniteSpace("F", "uvw"), [["u", "v"], ["w"]])
    for x in xi.space:
        for y in xi.space:
            dx, dy = SubDistribution.point(xi.space, x), SubDistribution.point(xi.space, y)
            assert rnd_equivalent(dx, dy, xi) == xi.equivalent(x, y)


def test_rnd_space_mismatch():
    with pytest.raises(PreconditionViolated):
        rnd_equivalent(SubDistribution.zero(UV), SubDistribution.zero(PQ), Partition.discrete(UV))


def test_discrete_xi_is_a_random_friend():
    assert is_random_friend(ROWS, Partition.discrete(UV), Partition.discrete(PQ))


def test_non_friendly_instance_gives_point_mass_witness():
    report = is_random_friend(ROWS, Partition.one_block(UV), Partition.discrete(PQ))
    assert not report
    assert report.witness == (SubDistribution.point(UV, "u"), SubDistribution.point(UV, "v"))


def test_codomain_mismatch():
    with pytest.raises(PreconditionViolated):
        is_random_friend(ROWS, Partition.discrete(UV), Partition.discrete(UV))


@pytest.mark.parametrize("seed", range(30))
def test_random_friend_agrees_with_friendship(seed):
    rows, xi, zeta = relation_instance(random.Random(seed), max_size=6, max_blocks=6)
    assert bool(is_random_friend(rows, xi, zeta)) == bool(is_friendly(rows, xi, zeta))


def test_kleisli_matches_direct_sum():
    rng = random.Random(11)
    for _ in range(20):
        rows, xi, _ = relation_instance(rng)
        m = {x: Q(rng.randint(0, 3), 12) for x in xi.space}
        plain = {x: dict(d.items()) for x, d in rows.items()}
        assert dict(kleisli_extension(rows, SubDistribution(xi.space, m)).items()) == oracles.kleisli(plain, m)
