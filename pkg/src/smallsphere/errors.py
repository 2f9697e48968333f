"""Exceptions shared across the package."""


class SmallSphereError(Exception):
    """Base class for all package errors."""


class InputError(SmallSphereError):
    """Malformed user input: bad rational token, bad config, bad file."""


class DegreeOverflowError(SmallSphereError):
    """A polynomial operation would exceed the supported ambient degree."""


class VerificationError(SmallSphereError):
    """Two independent computations of the same quantity disagree.

    Raised when a dual-path check fails exactly; this always indicates a
    broken construction, never a tolerance issue (the exact pipeline has no
    tolerances).
    """
