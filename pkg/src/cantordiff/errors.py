"""Exception hierarchy shared across the package."""


class CantordiffError(Exception):
    """Base class for all package errors."""


class ParseError(CantordiffError):
    """Malformed scalar, field declaration, or config text."""


class MixedFieldError(CantordiffError):
    """Two scalars from distinct quadratic fields were combined."""


class PreconditionError(CantordiffError):
    """An operation was called outside its stated domain."""


class BudgetExceededError(CantordiffError):
    """A search or enumeration hit its configured budget.

    Carries whatever partial result was available at the point of failure.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class UndecidableError(CantordiffError):
    """An enclosure-based comparison stayed ambiguous at the precision cap."""


class InternalInvariantError(CantordiffError):
    """A result violated an invariant the construction guarantees."""
