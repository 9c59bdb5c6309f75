"""
Exception hierarchy shared by the numerical library and the command line.

All errors raised on purpose derive from :class:`BouncerError` so the CLI can
map them to exit codes in one place (see ``core.diagnostics``).
"""

__all__ = [
    "BouncerError",
    "DomainError",
    "DegeneratePairError",
    "UnboundedBoundError",
    "UnsupportedScaleError",
    "ConvergenceError",
    "ConfigError",
    "NegativeOrderError",
]


class BouncerError(Exception):
    """Root of every error raised deliberately by this project."""


class DomainError(BouncerError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class DegeneratePairError(DomainError):
    """Two levels have (numerically) equal energies."""


class UnboundedBoundError(DomainError):
    """A bound formula has a vanishing denominator, so no finite bound exists."""


class UnsupportedScaleError(BouncerError):
    """The input is outside the range where the advertised accuracy holds."""


class ConvergenceError(BouncerError, ArithmeticError):
    """A bracket, root search or linear solve failed to produce a result."""


class ConfigError(BouncerError):
    """Invalid, unknown or missing configuration values."""


class NegativeOrderError(DomainError):
    """The Bessel route would need a negative order 2*upsilon*(1 - eps) (eps >= 1)."""
