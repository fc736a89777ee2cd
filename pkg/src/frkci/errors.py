"""Exception hierarchy shared across the package."""


class FrciError(Exception):
    """Base class for all errors raised by this package."""


class MarkConflictError(FrciError):
    """A definite endpoint mark (arrow or tail) would be overwritten.

    Raised instead of silently flipping a mark: a contradictory refinement
    signals either an algorithm bug or an input that is not faithful to any
    DAG, and neither should pass unnoticed.
    """


class InvariantError(FrciError):
    """A structural invariant was violated (cycle, deadlock, missing sepset...)."""


class DataError(FrciError):
    """Malformed input document, dataset, or conditional probability table."""
