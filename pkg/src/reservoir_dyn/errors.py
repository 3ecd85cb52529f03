"""Exception hierarchy shared by all modules.

The CLI maps these onto process exit codes, so solver code should raise the
most specific type that applies.
"""


class ReservoirDynError(Exception):
    """Base class for all package errors."""


class ConfigError(ReservoirDynError):
    """Malformed scenario file, unknown key, or out-of-domain parameter."""

    exit_code = 2


class QuadratureError(ReservoirDynError):
    """A frequency or wavenumber quadrature failed to converge.

    Carries the achieved error estimate when available.
    """

    exit_code = 3

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class StepBudgetError(ReservoirDynError):
    """Requested time step exceeds the stability/oscillation budget."""

    exit_code = 4


class NoPoleError(ReservoirDynError):
    """Laplace-domain root bracketing found no sign change."""

    exit_code = 5

    def __init__(self, message, bracket=None, residuals=None):
        super().__init__(message)
        self.bracket = bracket
        self.residuals = residuals


class MaterialPoleError(ReservoirDynError):
    """Permittivity evaluated too close to a pole of the dispersion model."""

    exit_code = 2
