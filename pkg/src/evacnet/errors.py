"""Shared exception types."""


class ValidationError(ValueError):
    """An input violates a structural or numeric invariant."""


class DuplicateIdError(ValidationError):
    """Two entities were declared with the same id."""


class UnknownIdError(ValidationError):
    """A reference points at an id that does not exist."""


class PreconditionError(RuntimeError):
    """An operation was invoked while its preconditions do not hold."""


class InvariantViolation(AssertionError):
    """A hard runtime invariant check failed."""
