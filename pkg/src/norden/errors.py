"""Exception hierarchy for the verification engine."""


class NordenError(Exception):
    """Base class for all engine errors."""


class StructuralError(NordenError):
    """An algebraic invariant is violated (valences, dimensions, J^2 != -I, ...)."""


class NumericError(NordenError):
    """A numerical operation cannot proceed (singular metric, ...)."""


class GenerationError(NordenError):
    """Randomized construction failed to produce a nondegenerate sample."""


class PreconditionError(NordenError):
    """An operation was called outside its stated domain of validity."""


class InternalConsistencyError(NordenError):
    """Two internal routes to the same quantity disagree beyond tolerance."""


class ParseError(NordenError):
    """Expression text could not be parsed; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DomainError(NordenError):
    """Expression evaluation hit a singular value; carries the subexpression."""

    def __init__(self, message: str, subexpression: str):
        super().__init__(f"{message} in '{subexpression}'")
        self.subexpression = subexpression


class ConfigError(NordenError):
    """Invalid suite or CLI configuration."""
