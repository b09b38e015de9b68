from __future__ import annotations

from fractions import Fraction as Q

import pytest

from stocon import CongruenceTriple, FiniteSpace, Partition, ProductSpace, StochasticAutomaton, SubDistribution

ACCEPTANCE_LINES: list[str] = []


def make_automaton(inputs, outputs, states, table) -> StochasticAutomaton:
    X = FiniteSpace("inputs", inputs)
    Y = FiniteSpace("outputs", outputs)
    Z = FiniteSpace("states", states)
    nxt = ProductSpace((Z, Y))
    return StochasticAutomaton(X, Y, Z, {k: SubDistribution(nxt, v) for k, v in table.items()})


A0_TABLE = {
    ("a", "s"): {("s", "0"): Q(1, 2), ("t", "0"): Q(1, 2)},
    ("a", "t"): {("s", "0"): Q(1, 2), ("t", "0"): Q(1, 2)},
    ("b", "s"): {("s", "1"): Q(1)},
    ("b", "t"): {("t", "1"): Q(1)},
}


def build_a0(overrides: dict | None = None) -> StochasticAutomaton:
    return make_automaton("ab", "01", "st", {**A0_TABLE, **(overrides or {})})


@pytest.fixture
def a0() -> StochasticAutomaton:
    return build_a0()


@pytest.fixture
def a0_states(a0) -> CongruenceTriple:
    return CongruenceTriple(
        Partition.discrete(a0.inputs), Partition.discrete(a0.outputs), Partition(a0.states, [["s", "t"]])
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
