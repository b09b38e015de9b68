"""Exact congruences, factor automata and stream semantics for finite stochastic automata."""

from .congruence import (
    CongruenceTriple,
    FriendshipReport,
    FriendshipWitness,
    block_masses,
    coarsest_state_congruence,
    compose_congruences,
    invariant_mass,
    is_congruence,
    is_friendly,
    kernel_congruence,
)
from .core import (
    FiniteSpace,
    Morphism,
    MorphismCheck,
    ProductSpace,
    StochasticAutomaton,
    SubDistribution,
    Violation,
    is_morphism,
    push_forward,
    validate_automaton,
    word_space,
)
from .errors import (
    FullProbabilityRequired,
    InternalConsistencyFailure,
    MalformedInput,
    NotACongruence,
    NotAMorphism,
    NotInTree,
    PreconditionViolated,
    StageDecompositionFailed,
    StoconError,
)
from .factor import (
    FactorResult,
    em_factorization,
    factor_automaton,
    refactor_isomorphism,
    relabel_automaton,
    stepwise_reduction,
)
from .partition import (
    Partition,
    ProductPartition,
    QuotientSpace,
    kernel_partition,
    lift_partition,
    power_partition,
    product_partition,
    quotient,
    transport_partition,
)
from .randomization import is_random_friend, kleisli_extension, rnd_equivalent
from .streams import (
    PrefixTree,
    StreamPresentation,
    WordDistribution,
    black_box,
    black_box_measure,
    check_power_friendship,
    cylinder_probability,
    decorate_tree,
    extend_word,
    leaf_output,
    marginal,
    word_behavior,
)

__version__ = "0.1.0"

__all__ = [
    "CongruenceTriple",
    "FactorResult",
    "FiniteSpace",
    "FriendshipReport",
    "FriendshipWitness",
    "FullProbabilityRequired",
    "InternalConsistencyFailure",
    "MalformedInput",
    "Morphism",
    "MorphismCheck",
    "NotACongruence",
    "NotAMorphism",
    "NotInTree",
    "Partition",
    "PreconditionViolated",
    "PrefixTree",
    "ProductPartition",
    "ProductSpace",
    "QuotientSpace",
    "StageDecompositionFailed",
    "StochasticAutomaton",
    "StoconError",
    "StreamPresentation",
    "SubDistribution",
    "Violation",
    "WordDistribution",
    "black_box",
    "black_box_measure",
    "block_masses",
    "check_power_friendship",
    "coarsest_state_congruence",
    "compose_congruences",
    "cylinder_probability",
    "decorate_tree",
    "em_factorization",
    "extend_word",
    "factor_automaton",
    "invariant_mass",
    "is_congruence",
    "is_friendly",
    "is_morphism",
    "is_random_friend",
    "kernel_congruence",
    "kernel_partition",
    "kleisli_extension",
    "leaf_output",
    "lift_partition",
    "marginal",
    "power_partition",
    "product_partition",
    "push_forward",
    "quotient",
    "refactor_isomorphism",
    "relabel_automaton",
    "rnd_equivalent",
    "stepwise_reduction",
    "transport_partition",
    "validate_automaton",
    "word_behavior",
    "word_space",
]
