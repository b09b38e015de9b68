"""Exception hierarchy.

Every error carries a short machine-readable ``code``; the CLI maps the
three families (input, precondition, internal) onto distinct exit codes.
"""


class StoconError(Exception):
    code = "error"


class MalformedInput(StoconError, ValueError):
    code = "malformed-input"


class PreconditionViolated(StoconError, ValueError):
    code = "precondition-violated"


class FullProbabilityRequired(PreconditionViolated):
    code = "full-probability-required"


class NotInTree(PreconditionViolated):
    code = "not-in-tree"


class NotAMorphism(PreconditionViolated):
    code = "not-a-morphism"

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class NotACongruence(PreconditionViolated):
    code = "not-a-congruence"

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class StageDecompositionFailed(PreconditionViolated):
    code = "stage-decomposition-failed"

    def __init__(self, message, stage, report=None):
        super().__init__(message)
        self.stage = stage
        self.report = report


class InternalConsistencyFailure(StoconError, AssertionError):
    """Raised when a defensive re-check disagrees with a computed result.

    This always indicates a bug in the library, never bad user input.
    """

    code = "internal-consistency-failure"
