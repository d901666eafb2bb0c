"""Exception hierarchy shared by all modules.

Each class maps onto one CLI exit code (see :mod:`mellin_hilbert.cli`).
"""

from __future__ import annotations


class MellinHilbertError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 1


class DomainError(MellinHilbertError, ValueError):
    """An argument lies outside the region where an operation is defined."""

    exit_code = 2


class PoleError(DomainError):
    """Evaluation requested too close to a pole of a symbol."""


class QuadratureError(MellinHilbertError, ArithmeticError):
    """A numerical integral could not be computed to the requested tolerance."""

    exit_code = 3


class DivergenceError(QuadratureError):
    """Window growth of a half-line integral failed to stabilise.

    ``partial_sums`` holds the running totals after each window extension,
    which usually makes the divergence pattern obvious (linear growth for a
    logarithmic singularity, geometric growth for a power).
    """

    def __init__(self, message, partial_sums=()):
        super().__init__(message)
        self.partial_sums = list(partial_sums)


class DecayError(QuadratureError):
    """Sampled decay of a contour integrand is slower than certified."""

    def __init__(self, message, measured_exponent=None):
        super().__init__(message)
        self.measured_exponent = measured_exponent


class ObstructionError(MellinHilbertError):
    """A solution was requested on a strip where none can exist."""

    exit_code = 4


class ShapeMismatchError(MellinHilbertError):
    """The branch difference is not a pure ``t**-0.5`` profile."""
