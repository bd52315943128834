"""Exception taxonomy shared by every module.

Callers can rely on the split: bad mathematical inputs raise DomainError,
bad knob settings raise ConfigError, and numerical machinery that fails to
deliver its requested accuracy raises QuadratureError or SolverError.
"""


class DomainError(ValueError):
    """Argument outside the mathematical domain of the operation."""


class ConfigError(ValueError):
    """Inconsistent or unusable configuration values."""


class QuadratureError(RuntimeError):
    """An integral could not be computed to the requested tolerance.

    Carries ``err_est`` (the best available error estimate) when known.
    """

    def __init__(self, message, err_est=None):
        super().__init__(message)
        self.err_est = err_est


class SolverError(RuntimeError):
    """A dense linear-algebra step failed or produced unusable output."""
