"""Exception and warning types shared across the package."""


class SppalError(Exception):
    """Base class for all package errors."""


class ParameterDomainError(SppalError, ValueError):
    """An input lies outside the documented domain of an operation."""


class InfeasibleDesignError(SppalError, ValueError):
    """A requested geometry or sizing has no feasible solution."""


class NumericalFailureError(SppalError, RuntimeError):
    """A quadrature or root finder failed its convergence budget.

    The message carries diagnostics (operation, inputs, last residual).
    """


class NoDualResonanceError(SppalError, RuntimeError):
    """A frequency response does not exhibit two interior velocity peaks."""


class ConfigError(SppalError, ValueError):
    """A run configuration failed parsing or semantic validation."""


class TruncationTailWarning(UserWarning):
    """The truncated part of a volume quadrature is estimated above budget."""


class BoundaryPeakWarning(UserWarning):
    """A curve maximum sits on the grid boundary; the grid is too short."""
