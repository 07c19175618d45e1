"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: ConfigError -> 1,
NumericalError / DomainExitError -> 2, ThresholdError -> 3.
"""


class MeltblowError(Exception):
    """Base class for all package errors."""


class DomainError(MeltblowError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(MeltblowError, ValueError):
    """Invalid configuration, CLI arguments, or malformed input files."""


class NumericalError(MeltblowError, RuntimeError):
    """An iterative or adaptive numerical procedure failed to converge.

    Carries whatever diagnostics the failing routine could salvage
    (last residuals, step size, position) in ``diagnostics``.
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class DomainExitError(MeltblowError):
    """A trajectory query left the flow-field domain.

    The jet simulator treats this as regular trajectory termination.
    """

    def __init__(self, position, message=None):
        self.position = tuple(float(c) for c in position)
        super().__init__(message or f"position {self.position} outside flow domain")


class ThresholdError(MeltblowError):
    """A validation run finished but an acceptance threshold failed."""
