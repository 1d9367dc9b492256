"""Exception types shared across the package.

Exit-code mapping used by the CLI: infeasible problems exit 2, numerical
failures exit 3, configuration and I/O problems exit 4.
"""


class PenflowError(Exception):
    """Base class for all package errors."""


class ConfigError(PenflowError):
    """Malformed, inconsistent, or out-of-range configuration input."""


class DomainError(PenflowError):
    """An argument violates an operation's domain contract."""


class InfeasibleProblemError(PenflowError):
    """The feasible region is empty or could not be certified nonempty."""


class NumericalFailureError(PenflowError):
    """Non-finite values or a diverging iteration."""


class DiagnosticError(PenflowError):
    """A diagnostic quantity cannot be computed from the given data."""
