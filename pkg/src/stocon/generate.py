"""Seeded generators of small random instances.

Used by ``stocon selftest`` and by the test suite.  Every instance is a
deterministic function of the ``random.Random`` passed in.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .congruence import CongruenceTriple
from .core import FiniteSpace, Morphism, ProductSpace, StochasticAutomaton, SubDistribution
from .partition import Partition, transport_partition

INPUT_LABELS = "abcdefgh"
OUTPUT_LABELS = "01234567"
STATE_LABELS = "stuvwpqr"


def spaces(nx: int, ny: int, nz: int) -> tuple[FiniteSpace, FiniteSpace, FiniteSpace]:
    return (
        FiniteSpace("inputs", INPUT_LABELS[:nx]),
        FiniteSpace("outputs", OUTPUT_LABELS[:ny]),
        FiniteSpace("states", STATE_LABELS[:nz]),
    )


def weights(rng: random.Random, k: int, total: Fraction = Fraction(1), max_weight: int = 4, sparse: bool = True) -> list[Fraction]:
    """``k`` nonnegative rationals summing to ``total``."""
    if total == 0:
        return [Fraction(0)] * k
    lo = 0 if sparse else 1
    raw = [rng.randint(lo, max_weight) for _ in range(k)]
    if not any(raw):
        raw[rng.randrange(k)] = 1
    s = sum(raw)
    return [Fraction(r, s) * total for r in raw]


def distribution(rng: random.Random, space, total: Fraction = Fraction(1), **kw) -> SubDistribution:
    elems = list(space)
    return SubDistribution(space, dict(zip(elems, weights(rng, len(elems), total, **kw))))


def row_mass(rng: random.Random, full: bool) -> Fraction:
    return Fraction(1) if full else Fraction(rng.randint(1, 4), 4)


def random_partition(rng: random.Random, space, max_blocks: int | None = None) -> Partition:
    k = max_blocks or len(space)
    return Partition.from_key(space, lambda _e: rng.randrange(k))


def random_coarsening(rng: random.Random, p: Partition) -> Partition:
    """Merge blocks of ``p`` at random."""
    k = p.num_blocks
    tag = [rng.randrange(k) for _ in range(k)]
    return Partition.from_key(p.space, lambda e: tag[p.block_of(e)])


def random_surjection(rng: random.Random, source, target) -> dict:
    src = list(source)
    rng.shuffle(src)
    tgt = list(target)
    m = {e: tgt[i] for i, e in enumerate(src[: len(tgt)])}
    for e in src[len(tgt):]:
        m[e] = rng.choice(tgt)
    return m


def random_automaton(rng: random.Random, nx: int, ny: int, nz: int, full: bool = True) -> StochasticAutomaton:
    return automaton_on(rng, *spaces(nx, ny, nz), full=full)


def automaton_on(rng: random.Random, X, Y, Z, full: bool = True) -> StochasticAutomaton:
    nxt = ProductSpace((Z, Y))
    law = {(x, z): distribution(rng, nxt, row_mass(rng, full)) for x in X for z in Z}
    return StochasticAutomaton(X, Y, Z, law)


def planted_automaton(
    rng: random.Random,
    nx: int,
    ny: int,
    nz: int,
    fine: CongruenceTriple | None = None,
    coarse: CongruenceTriple | None = None,
    full: bool = True,
) -> tuple[StochasticAutomaton, CongruenceTriple, CongruenceTriple]:
    """Random automaton for which both ``fine`` and ``coarse`` are congruences.

    ``coarse`` must be coarser than ``fine``.  The table is the product of
    a law between coarse classes, a split onto fine class rectangles that
    depends only on the fine classes of ``(x, z)``, and within-class splits
    that depend on ``z`` (for the next state) and on ``x`` (for the output).
    The latter shape makes ``(1, 1, gamma)`` and ``(alpha, beta, 1)``
    congruences too, so the fine triple factors stepwise in either order.
    """
    X, Y, Z = spaces(nx, ny, nz)
    if fine is None:
        fine = CongruenceTriple(random_partition(rng, X), random_partition(rng, Y), random_partition(rng, Z))
    if coarse is None:
        coarse = CongruenceTriple(
            random_coarsening(rng, fine.alpha), random_coarsening(rng, fine.beta), random_coarsening(rng, fine.gamma)
        )
    a1, b1, g1 = fine.alpha, fine.beta, fine.gamma
    a2, b2, g2 = coarse.alpha, coarse.beta, coarse.gamma

    top = {}
    for i in range(a2.num_blocks):
        for j in range(g2.num_blocks):
            cells = [(c, b) for c in range(g2.num_blocks) for b in range(b2.num_blocks)]
            top[i, j] = dict(zip(cells, weights(rng, len(cells), row_mass(rng, full))))

    def fine_cells(c2, b2_):
        cs = sorted({g1.block_of(z) for z in g2.blocks[c2]})
        bs = sorted({b1.block_of(y) for y in b2.blocks[b2_]})
        return [(c, b) for c in cs for b in bs]

    split = {}
    for i in range(a1.num_blocks):
        for j in range(g1.num_blocks):
            for c2 in range(g2.num_blocks):
                for bb in range(b2.num_blocks):
                    cells = fine_cells(c2, bb)
                    split[i, j, c2, bb] = dict(zip(cells, weights(rng, len(cells), sparse=False)))
    state_split = {
        (c, z): dict(zip(g1.blocks[c], weights(rng, len(g1.blocks[c]))))
        for c in range(g1.num_blocks)
        for z in Z
    }
    output_split = {
        (b, x): dict(zip(b1.blocks[b], weights(rng, len(b1.blocks[b]))))
        for b in range(b1.num_blocks)
        for x in X
    }

    nxt = ProductSpace((Z, Y))
    law = {}
    for x in X:
        for z in Z:
            i1, j1 = a1.block_of(x), g1.block_of(z)
            i2, j2 = a2.block_of(x), g2.block_of(z)
            acc = {}
            for (c2, bb), p2 in top[i2, j2].items():
                for (c1, b1_), p1 in split[i1, j1, c2, bb].items():
                    for z2, pz in state_split[c1, z].items():
                        for y, py in output_split[b1_, x].items():
                            acc[(z2, y)] = p2 * p1 * pz * py
            law[(x, z)] = SubDistribution(nxt, acc)
    return StochasticAutomaton(X, Y, Z, law), fine, coarse


def stacked_instance(rng: random.Random, nx: int, ny: int, nz: int, full: bool = True):
    """``(a, c, c')`` with ``c`` a congruence on ``a`` and ``c'`` one on the factor by ``c``."""
    a, fine, coarse = planted_automaton(rng, nx, ny, nz, full=full)
    c_prime = CongruenceTriple(
        transport_partition(coarse.alpha, fine.alpha),
        transport_partition(coarse.beta, fine.beta),
        transport_partition(coarse.gamma, fine.gamma),
    )
    return a, fine, c_prime


def morphism_instance(rng: random.Random, nx: int, ny: int, nz: int, full: bool = True) -> Morphism:
    """Random surjective triple onto a random target, with the source table built to commute."""
    X, Y, Z = spaces(nx, ny, nz)
    tx, ty, tz = (rng.randint(1, n) for n in (nx, ny, nz))
    Xt = FiniteSpace("inputs", [x.upper() for x in INPUT_LABELS[:tx]])
    Yt = FiniteSpace("outputs", [f"o{y}" for y in OUTPUT_LABELS[:ty]])
    Zt = FiniteSpace("states", [z.upper() for z in STATE_LABELS[:tz]])
    target = automaton_on(rng, Xt, Yt, Zt, full)
    f = random_surjection(rng, X, Xt)
    g = random_surjection(rng, Y, Yt)
    h = random_surjection(rng, Z, Zt)
    fib_z = {t: [z for z in Z if h[z] == t] for t in Zt}
    fib_y = {t: [y for y in Y if g[y] == t] for t in Yt}
    nxt = ProductSpace((Z, Y))
    law = {}
    for x in X:
        for z in Z:
            acc = {}
            for (zt, yt), p in target.row(f[x], h[z]).items():
                cells = [(z2, y) for z2 in fib_z[zt] for y in fib_y[yt]]
                for cell, w in zip(cells, weights(rng, len(cells), p)):
                    acc[cell] = w
            law[(x, z)] = SubDistribution(nxt, acc)
    source = StochasticAutomaton(X, Y, Z, law)
    return Morphism(source, target, f, g, h)
