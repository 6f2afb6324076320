"""Exception hierarchy.

``ConfigError`` maps to CLI exit code 2, every ``NumericError`` subtype to
exit code 1.
"""


class FlexctlError(Exception):
    """Base class for all library errors."""


class DimensionError(FlexctlError):
    """An operand violates a shape or dimension contract."""


class NumericError(FlexctlError):
    """Base class for runtime numerical failures."""


class KernelDegeneracyError(NumericError):
    """The control block of a quadratic kernel is singular or indefinite."""


class ExcitationError(NumericError):
    """A regression problem is rank deficient for lack of excitation."""

    def __init__(self, message, rank=None, required=None):
        super().__init__(message)
        self.rank = rank
        self.required = required


class ConvergenceError(NumericError):
    """An iteration hit its step limit before meeting its tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SimulationDiverged(NumericError):
    """A simulated state left the finite-magnitude guard region."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ConfigError(FlexctlError):
    """An experiment configuration is malformed or inconsistent."""
