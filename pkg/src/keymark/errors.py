"""Exception types shared across the package."""

__all__ = [
    "KeymarkError",
    "ParameterError",
    "CapacityError",
    "ValidationError",
    "SolverError",
    "InvariantError",
]


class KeymarkError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(KeymarkError, ValueError):
    """An argument is outside its documented domain."""


class CapacityError(KeymarkError, RuntimeError):
    """A configured size cap (key enumeration, LP variables) would be exceeded."""


class ValidationError(KeymarkError, ValueError):
    """A document or object violates a structural invariant."""


class SolverError(KeymarkError, RuntimeError):
    """The LP solver exceeded its iteration cap."""


class InvariantError(KeymarkError, AssertionError):
    """An internal identity that the theory guarantees failed to hold.

    Reaching this indicates a bug in this package, not bad user input.
    """
