"""Finite spaces, exact subprobabilities, stochastic automata and morphisms.

All probabilities are :class:`fractions.Fraction` values; nothing in this
package ever touches a float.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, Mapping

from .errors import MalformedInput, NotAMorphism, PreconditionViolated

Label = Hashable

__all__ = [
    "FiniteSpace",
    "ProductSpace",
    "word_space",
    "SubDistribution",
    "StochasticAutomaton",
    "Violation",
    "validate_automaton",
    "push_forward",
    "Morphism",
    "MorphismCheck",
    "is_morphism",
    "check_surjective",
    "to_fraction",
    "format_fraction",
]


def to_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings; floats are refused."""
    if isinstance(value, bool):
        raise MalformedInput(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise MalformedInput(f"not a rational: {value!r}") from None
    raise MalformedInput(f"not an exact rational: {value!r}")


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


class FiniteSpace:
    """A named, ordered, finite set of distinct labels."""

    __slots__ = ("name", "elements", "_index")

    def __init__(self, name: str, elements: Iterable[Label]):
        elements = tuple(elements)
        if not elements:
            raise MalformedInput(f"space {name!r} is empty")
        index = {}
        for i, e in enumerate(elements):
            if e in index:
                raise MalformedInput(f"duplicate label {e!r} in space {name!r}")
            index[e] = i
        self.name = name
        self.elements = elements
        self._index = index

    def key(self, e: Label) -> int:
        try:
            return self._index[e]
        except KeyError:
            raise MalformedInput(f"label {e!r} not in space {self.name!r}") from None

    def __contains__(self, e) -> bool:
        try:
            return e in self._index
        except TypeError:
            return False

    def __iter__(self) -> Iterator[Label]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteSpace):
            return NotImplemented
        return self.name == other.name and self.elements == other.elements

    def __hash__(self) -> int:
        return hash((self.name, self.elements))

    def __repr__(self) -> str:
        return f"FiniteSpace({self.name!r}, {list(self.elements)!r})"


class ProductSpace:
    """Cartesian product whose elements are label tuples.

    Nothing is enumerated unless iterated; membership and ordering keys
    are computed componentwise.
    """

    __slots__ = ("factors",)

    def __init__(self, factors: Iterable):
        self.factors = tuple(factors)
        if not self.factors:
            raise MalformedInput("empty product")

    @property
    def name(self) -> str:
        return "x".join(f.name for f in self.factors)

    def key(self, e) -> tuple:
        if not isinstance(e, tuple) or len(e) != len(self.factors):
            raise MalformedInput(f"{e!r} is not an element of {self.name}")
        return tuple(f.key(c) for f, c in zip(self.factors, e))

    def __contains__(self, e) -> bool:
        return (
            isinstance(e, tuple)
            and len(e) == len(self.factors)
            and all(c in f for f, c in zip(self.factors, e))
        )

    def __iter__(self):
        return itertools.product(*self.factors)

    def __len__(self) -> int:
        n = 1
        for f in self.factors:
            n *= len(f)
        return n

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProductSpace):
            return NotImplemented
        return self.factors == other.factors

    def __hash__(self) -> int:
        return hash(("product", self.factors))

    def __repr__(self) -> str:
        return f"ProductSpace({self.name})"


def word_space(base, n: int) -> ProductSpace:
    """Words of length ``n`` over ``base``, represented as label tuples."""
    if n < 1:
        raise PreconditionViolated("word length must be at least 1")
    return ProductSpace((base,) * n)


class SubDistribution:
    """Sparse exact subprobability over a finite space.

    Stored in canonical form: zero weights are dropped and the support is
    kept in space order, so two distributions are equal iff their item
    tuples are.  Construction only checks that labels belong to the space;
    range checks (nonnegativity, mass <= 1) are reported by
    :meth:`violations` so that invalid input can still be diagnosed.
    """

    __slots__ = ("space", "_items", "_map")

    def __init__(self, space, weights: Mapping | Iterable = ()):
        pairs = weights.items() if isinstance(weights, Mapping) else weights
        acc: dict = {}
        for e, w in pairs:
            if e not in space:
                raise MalformedInput(f"label {e!r} outside space {space.name}")
            acc[e] = acc.get(e, 0) + to_fraction(w)
        items = sorted(((e, w) for e, w in acc.items() if w != 0), key=lambda it: space.key(it[0]))
        self.space = space
        self._items = tuple(items)
        self._map = dict(items)

    @classmethod
    def point(cls, space, e) -> SubDistribution:
        return cls(space, {e: 1})

    @classmethod
    def zero(cls, space) -> SubDistribution:
        return cls(space)

    def __getitem__(self, e) -> Fraction:
        return self._map.get(e, Fraction(0))

    def items(self) -> tuple:
        return self._items

    def support(self) -> tuple:
        return tuple(e for e, _ in self._items)

    @property
    def mass(self) -> Fraction:
        return sum((w for _, w in self._items), Fraction(0))

    def measure(self, events: Iterable) -> Fraction:
        """Mass of a set of labels."""
        return sum((self[e] for e in set(events)), Fraction(0))

    def violations(self) -> list[str]:
        out = [f"negative-weight {e!r}" for e, w in self._items if w < 0]
        if self.mass > 1:
            out.append("mass-exceeds-one")
        return out

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubDistribution):
            return NotImplemented
        return self.space == other.space and self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __repr__(self) -> str:
        body = ", ".join(f"{e!r}: {format_fraction(w)}" for e, w in self._items)
        return "{" + body + "}"


def push_forward(d: SubDistribution, m: Mapping | Callable, target) -> SubDistribution:
    """Image of ``d`` under the map ``m`` into the space ``target``."""
    fn = m.__getitem__ if isinstance(m, Mapping) else m
    acc: dict = {}
    for e, w in d.items():
        try:
            image = fn(e)
        except KeyError:
            raise PreconditionViolated(f"map undefined on {e!r}") from None
        acc[image] = acc.get(image, 0) + w
    return SubDistribution(target, acc)


class StochasticAutomaton:
    """Finite stochastic Mealy automaton.

    ``law`` maps each ``(input, state)`` pair to a :class:`SubDistribution`
    over ``states x outputs``.  Invalid tables are accepted so they can be
    inspected with :func:`validate_automaton`.
    """

    __slots__ = ("inputs", "outputs", "states", "_law")

    def __init__(self, inputs: FiniteSpace, outputs: FiniteSpace, states: FiniteSpace, law: Mapping):
        self.inputs = inputs
        self.outputs = outputs
        self.states = states
        self._law = dict(law)

    @property
    def next_space(self) -> ProductSpace:
        return ProductSpace((self.states, self.outputs))

    @property
    def pair_space(self) -> ProductSpace:
        return ProductSpace((self.inputs, self.states))

    @property
    def law(self) -> Mapping:
        return self._law

    def row(self, x, z) -> SubDistribution:
        try:
            return self._law[(x, z)]
        except KeyError:
            raise PreconditionViolated(f"no row for ({x}, {z})") from None

    def rows(self) -> dict:
        """The law as a relation ``inputs x states => states x outputs``."""
        return {(x, z): self.row(x, z) for x in self.inputs for z in self.states}

    @property
    def fully_probabilistic(self) -> bool:
        return all(self.row(x, z).mass == 1 for x in self.inputs for z in self.states)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StochasticAutomaton):
            return NotImplemented
        return (
            self.inputs == other.inputs
            and self.outputs == other.outputs
            and self.states == other.states
            and self._law == other._law
        )

    def __hash__(self) -> int:
        return hash((self.inputs, self.outputs, self.states, frozenset(self._law.items())))

    def __repr__(self) -> str:
        return (
            f"StochasticAutomaton(|X|={len(self.inputs)}, |Y|={len(self.outputs)}, "
            f"|Z|={len(self.states)})"
        )


@dataclass(frozen=True)
class Violation:
    kind: str
    where: tuple
    detail: str = ""

    def __str__(self) -> str:
        loc = "(" + ",".join(str(w) for w in self.where) + ")"
        s = f"{self.kind} at {loc}" if self.kind != "missing-row" else f"missing-row {loc}"
        return f"{s}: {self.detail}" if self.detail else s


def validate_automaton(a: StochasticAutomaton) -> list[Violation]:
    out = []
    nxt = a.next_space
    for key in a.law:
        if not (isinstance(key, tuple) and len(key) == 2 and key[0] in a.inputs and key[1] in a.states):
            out.append(Violation("unknown-row", key if isinstance(key, tuple) else (key,)))
    for x in a.inputs:
        for z in a.states:
            row = a.law.get((x, z))
            if row is None:
                out.append(Violation("missing-row", (x, z)))
                continue
            if row.space != nxt:
                out.append(Violation("wrong-row-space", (x, z), row.space.name))
                continue
            for e, w in row.items():
                if w < 0:
                    cell = "(" + ",".join(map(str, e)) + ")"
                    out.append(Violation("negative-weight", (x, z), f"{cell} -> {format_fraction(w)}"))
            if row.mass > 1:
                out.append(Violation("mass-exceeds-one", (x, z), format_fraction(row.mass)))
    return out


def check_surjective(m: Mapping, source, target, name: str) -> None:
    for e in source:
        if e not in m:
            raise PreconditionViolated(f"{name} is undefined on {e!r}")
        if m[e] not in target:
            raise PreconditionViolated(f"{name}({e!r}) = {m[e]!r} is outside {target.name}")
    missed = [t for t in target if t not in set(m[e] for e in source)]
    if missed:
        raise PreconditionViolated(f"{name} is not surjective: misses {missed[0]!r}")


@dataclass(frozen=True)
class MorphismCheck:
    ok: bool
    # (x, z, (z', y'), expected target mass, pushed-forward source mass)
    counterexample: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_morphism(src: StochasticAutomaton, tgt: StochasticAutomaton, f: Mapping, g: Mapping, h: Mapping) -> MorphismCheck:
    """Check the commuting square ``K'(f x, h z) = S(h x g)(K(x, z))``.

    Comparing whole distributions is the same as comparing every singleton
    of the target, and the first differing singleton in target order is
    returned as counterexample.
    """
    check_surjective(f, src.inputs, tgt.inputs, "f")
    check_surjective(g, src.outputs, tgt.outputs, "g")
    check_surjective(h, src.states, tgt.states, "h")
    nxt = tgt.next_space

    def hg(pair):
        return (h[pair[0]], g[pair[1]])

    for x in src.inputs:
        for z in src.states:
            image = push_forward(src.row(x, z), hg, nxt)
            expected = tgt.row(f[x], h[z])
            if image != expected:
                cells = sorted(set(image.support()) | set(expected.support()), key=nxt.key)
                for cell in cells:
                    if image[cell] != expected[cell]:
                        return MorphismCheck(False, (x, z, cell, expected[cell], image[cell]))
    return MorphismCheck(True)


@dataclass(frozen=True, eq=False)
class Morphism:
    """Triple of surjections ``(f, g, h)`` on inputs, outputs and states."""

    source: StochasticAutomaton
    target: StochasticAutomaton
    f: Mapping
    g: Mapping
    h: Mapping

    def check(self) -> MorphismCheck:
        return is_morphism(self.source, self.target, self.f, self.g, self.h)

    def require(self) -> Morphism:
        res = self.check()
        if not res:
            raise NotAMorphism(f"diagram fails at {res.counterexample}", res.counterexample)
        return self

    def then(self, other: Morphism) -> Morphism:
        """Componentwise composition ``other . self``."""
        return Morphism(
            self.source,
            other.target,
            {x: other.f[v] for x, v in self.f.items()},
            {y: other.g[v] for y, v in self.g.items()},
            {z: other.h[v] for z, v in self.h.items()},
        )

    @classmethod
    def identity(cls, a: StochasticAutomaton) -> Morphism:
        return cls(a, a, {x: x for x in a.inputs}, {y: y for y in a.outputs}, {z: z for z in a.states})

    def same_maps(self, other: Morphism) -> bool:
        return dict(self.f) == dict(other.f) and dict(self.g) == dict(other.g) and dict(self.h) == dict(other.h)
