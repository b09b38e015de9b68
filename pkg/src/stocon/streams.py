"""Sequential semantics: word extension, black box, cylinders and trees.

Infinite input streams are handled through eventually periodic
presentations.  A cylinder query of depth ``n`` only ever looks at the
first ``n`` letters, so every question about the limit semantics is
answered by a finite computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .congruence import CongruenceTriple, FriendshipReport, is_friendly, require_congruence
from .core import ProductSpace, StochasticAutomaton, SubDistribution, push_forward, word_space
from .errors import FullProbabilityRequired, MalformedInput, NotInTree, PreconditionViolated
from .partition import power_partition, product_partition

__all__ = [
    "WordDistribution",
    "StreamPresentation",
    "PrefixTree",
    "extend_word",
    "word_behavior",
    "black_box",
    "black_box_measure",
    "marginal",
    "cylinder_probability",
    "decorate_tree",
    "leaf_output",
    "check_power_friendship",
    "uniform",
]


@dataclass(frozen=True)
class WordDistribution:
    """Joint law of the final state and the output word after reading a word."""

    length: int
    dist: SubDistribution

    def outputs(self) -> SubDistribution:
        """Marginal on output words (the final state is hidden)."""
        return push_forward(self.dist, lambda p: p[1], self.dist.space.factors[1])

    @property
    def mass(self) -> Fraction:
        return self.dist.mass


def _show(v: tuple) -> str:
    if all(isinstance(e, str) and len(e) == 1 for e in v):
        return "".join(v)
    return "[" + ", ".join(map(str, v)) + "]"


def _check_word(a: StochasticAutomaton, v: Sequence) -> tuple:
    v = tuple(v)
    if not v:
        raise PreconditionViolated("input word must be nonempty")
    for x in v:
        if x not in a.inputs:
            raise MalformedInput(f"letter {x!r} is not an input of the automaton")
    return v


def _step(a: StochasticAutomaton, acc: dict, x) -> dict:
    # one more letter: (z', w) -> (z'', w.y) weighted by K(x, z')(z'', y)
    out: dict = {}
    for (z1, w), p in acc.items():
        for (z2, y), q in a.row(x, z1).items():
            key = (z2, w + (y,))
            out[key] = out.get(key, 0) + p * q
    return out


def extend_word(a: StochasticAutomaton, v: Sequence, z) -> WordDistribution:
    """Run the word ``v`` from state ``z``; result lives on ``states x Y^|v|``."""
    v = _check_word(a, v)
    if z not in a.states:
        raise MalformedInput(f"{z!r} is not a state")
    acc = {(z2, (y,)): p for (z2, y), p in a.row(v[0], z).items()}
    for x in v[1:]:
        acc = _step(a, acc, x)
    space = ProductSpace((a.states, word_space(a.outputs, len(v))))
    return WordDistribution(len(v), SubDistribution(space, acc))


def _check_initial(a: StochasticAutomaton, mu: SubDistribution) -> None:
    if mu.space != a.states:
        raise PreconditionViolated("initial distribution is not over the states")


def word_behavior(a: StochasticAutomaton, mu: SubDistribution, v: Sequence) -> SubDistribution:
    """Distribution of output words for input ``v`` with initial law ``mu``."""
    v = _check_word(a, v)
    _check_initial(a, mu)
    acc: dict = {}
    for z, m in mu.items():
        for (_, w), p in extend_word(a, v, z).dist.items():
            acc[w] = acc.get(w, 0) + m * p
    return SubDistribution(word_space(a.outputs, len(v)), acc)


def black_box(a: StochasticAutomaton, mu: SubDistribution, v: Sequence) -> SubDistribution:
    """The black box at ``v``; it only ever charges words of length ``|v|``."""
    return word_behavior(a, mu, v)


def black_box_measure(a: StochasticAutomaton, mu: SubDistribution, v: Sequence, words: Iterable) -> Fraction:
    """Black-box probability of a set of output words of arbitrary lengths."""
    v = tuple(v)
    same_length = [tuple(w) for w in words if len(w) == len(v)]
    return black_box(a, mu, v).measure(same_length)


def marginal(d: SubDistribution, n: int) -> SubDistribution:
    """Project a distribution on words of length ``m >= n`` onto the first ``n`` letters."""
    factors = d.space.factors
    if n < 1 or n > len(factors):
        raise PreconditionViolated(f"cannot project words of length {len(factors)} to length {n}")
    return push_forward(d, lambda w: w[:n], ProductSpace(factors[:n]))


def uniform(space) -> SubDistribution:
    k = len(space)
    return SubDistribution(space, {e: Fraction(1, k) for e in space})


def _require_full(a: StochasticAutomaton, mu: SubDistribution) -> None:
    if not a.fully_probabilistic:
        raise FullProbabilityRequired("automaton loses mass; every row must have mass 1")
    if mu.mass != 1:
        raise FullProbabilityRequired("initial distribution must have mass 1")


@dataclass(frozen=True)
class StreamPresentation:
    """The word ``prefix . period^omega`` (finite when ``period`` is empty)."""

    prefix: tuple
    period: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "period", tuple(self.period))
        if not self.prefix and not self.period:
            raise MalformedInput("empty stream")

    @property
    def infinite(self) -> bool:
        return bool(self.period)

    @property
    def length(self) -> float | int:
        return math.inf if self.infinite else len(self.prefix)

    def letter(self, i: int):
        if i < len(self.prefix):
            return self.prefix[i]
        if not self.period:
            raise IndexError(i)
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def truncate(self, n: int) -> tuple:
        """The first ``n`` letters."""
        if n > self.length:
            raise PreconditionViolated(f"stream of length {self.length} has no prefix of length {n}")
        return tuple(self.letter(i) for i in range(n))

    def horizon(self, other: StreamPresentation) -> int:
        """Length up to which two presentations must be compared to decide prefix relations."""
        lcm = math.lcm(len(self.period) or 1, len(other.period) or 1)
        return len(self.prefix) + len(other.prefix) + len(self.period) + len(other.period) + lcm

    def is_proper_prefix_of(self, other: StreamPresentation) -> bool:
        if self.infinite or other.length <= len(self.prefix):
            return False
        return other.truncate(len(self.prefix)) == self.prefix

    def same_word(self, other: StreamPresentation) -> bool:
        if self.infinite != other.infinite:
            return False
        if not self.infinite:
            return self.prefix == other.prefix
        h = self.horizon(other)
        return self.truncate(h) == other.truncate(h)


class PrefixTree:
    """A prefix-free set of finite or eventually periodic input words."""

    def __init__(self, paths: Iterable[StreamPresentation]):
        unique: list[StreamPresentation] = []
        for p in paths:
            if not any(p.same_word(q) for q in unique):
                unique.append(p)
        if not unique:
            raise MalformedInput("a tree needs at least one path")
        for p in unique:
            for q in unique:
                if p is not q and p.is_proper_prefix_of(q):
                    raise MalformedInput(f"tree is not prefix free: {p.prefix} is a prefix of another path")
        self.paths = tuple(unique)

    def containing(self, v: Sequence) -> list[StreamPresentation]:
        v = tuple(v)
        return [p for p in self.paths if p.length >= len(v) and p.truncate(len(v)) == v]

    def __iter__(self):
        return iter(self.paths)

    def __len__(self) -> int:
        return len(self.paths)


def cylinder_probability(
    a: StochasticAutomaton, mu: SubDistribution, tau: StreamPresentation, n: int, words: Iterable
) -> Fraction:
    """Limit-semantics probability of the cylinder over a set of length-``n`` output words."""
    _require_full(a, mu)
    if n < 1:
        raise PreconditionViolated("depth must be at least 1")
    target = word_space(a.outputs, n)
    words = [tuple(w) for w in words]
    for w in words:
        if w not in target:
            raise MalformedInput(f"{w!r} is not an output word of length {n}")
    return word_behavior(a, mu, tau.truncate(n)).measure(words)


def decorate_tree(
    a: StochasticAutomaton,
    mu: SubDistribution,
    tree: PrefixTree,
    v: Sequence,
    path: StreamPresentation | None = None,
) -> SubDistribution:
    """Output distribution attached to the tree node ``v``.

    Computed along ``path`` (default: the first path through ``v``) by
    running the whole path, or one full period past its prefix when it is
    infinite, and projecting onto the first ``|v|`` outputs.
    """
    _require_full(a, mu)
    v = _check_word(a, v)
    through = tree.containing(v)
    if not through:
        raise NotInTree(f"{_show(v)} is not a prefix of any path in the tree")
    if path is None:
        path = through[0]
    elif not any(path.same_word(p) for p in through):
        raise NotInTree("the chosen path does not pass through the node")
    depth = max(len(v), len(path.prefix) + len(path.period)) if path.infinite else len(path.prefix)
    return marginal(word_behavior(a, mu, path.truncate(depth)), len(v))


def leaf_output(
    a: StochasticAutomaton, mu: SubDistribution, tree: PrefixTree, v: Sequence, last: Iterable
) -> Fraction:
    """Probability that the last output at node ``v`` falls into ``last``."""
    last = set(last)
    return sum((p for w, p in decorate_tree(a, mu, tree, v).items() if w[-1] in last), Fraction(0))


def _extended_rows(a: StochasticAutomaton, n: int) -> dict:
    """``{(v, z): K(v, z)}`` for every input word ``v`` of length ``n``."""
    layer = {((x,), z): {(z2, (y,)): p for (z2, y), p in a.row(x, z).items()} for x in a.inputs for z in a.states}
    for _ in range(n - 1):
        layer = {(v + (x,), z): _step(a, acc, x) for (v, z), acc in layer.items() for x in a.inputs}
    space = ProductSpace((a.states, word_space(a.outputs, n)))
    return {key: SubDistribution(space, acc) for key, acc in layer.items()}


def check_power_friendship(
    a: StochasticAutomaton, c: CongruenceTriple, n: int, mu: SubDistribution | None = None
) -> FriendshipReport:
    """Check that a congruence survives ``n`` steps of sequential work.

    Verifies ``alpha^n x gamma`` friendly to ``gamma x beta^n`` for the
    extended law, then ``alpha^n`` friendly to ``beta^n`` for the black box
    at ``mu`` (uniform on the states by default).  Returns the first
    failure; a failure here means a bug, since both hold for every
    congruence.
    """
    if n < 1:
        raise PreconditionViolated("n must be at least 1")
    require_congruence(a, c)
    rows = _extended_rows(a, n)
    alpha_n, beta_n = power_partition(c.alpha, n), power_partition(c.beta, n)
    report = is_friendly(rows, product_partition(alpha_n, c.gamma), product_partition(c.gamma, beta_n))
    if not report:
        return report
    mu = mu if mu is not None else uniform(a.states)
    _check_initial(a, mu)
    words = sorted({v for v, _ in rows}, key=alpha_n.space.key)
    box_rows = {v: word_behavior(a, mu, v) for v in words}
    return is_friendly(box_rows, alpha_n, beta_n)
