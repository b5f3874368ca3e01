"""Exception hierarchy shared across the package."""


class ShiftOracleError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(ShiftOracleError):
    """Malformed or out-of-contract input values."""


class MissingLabels(ShiftOracleError):
    """An operation that needs ground-truth labels got a PredictionSet without them."""


class FormatError(ShiftOracleError):
    """A matrix or label file failed to parse."""


class Unconverged(ShiftOracleError):
    """Iterative solver hit its iteration cap; carries the last iterate."""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class OutOfTheoremScope(ShiftOracleError):
    """Toy-model operation invoked outside the regime its guarantee covers."""


class EmptyGroup(ShiftOracleError):
    """A group-level statistic was requested for an empty group."""


class DegenerateInput(ShiftOracleError):
    """Input admits no well-defined answer (e.g. all x values equal in a line fit)."""
