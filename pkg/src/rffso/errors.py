"""Exception hierarchy shared by the numerical kernel and the analysis layers."""


class RffsoError(Exception):
    """Base class for all package errors."""


class ParameterError(RffsoError, ValueError):
    """A parameter set violates its invariants."""


class GammaPoleError(RffsoError, ValueError):
    """Gamma function evaluated at a non-positive integer."""


class ContourError(RffsoError):
    """No vertical contour separates the left and right pole families."""


class ConvergenceError(RffsoError):
    """Quadrature did not reach the requested tolerance.

    ``estimate`` and ``error`` carry the last value and its error estimate.
    """

    def __init__(self, msg, estimate=None, error=None):
        super().__init__(msg)
        self.estimate = estimate
        self.error = error


class OverflowSignal(RffsoError, OverflowError):
    """A special function overflowed double precision."""


class DerivativeOrderError(RffsoError, ValueError):
    """Requested parameter-derivative order exceeds the supported cap."""


class ConfigError(RffsoError):
    """Malformed scenario or sweep configuration."""


class ModelMismatchError(RffsoError):
    """A closed form disagrees with its defining integral beyond tolerance."""


class RegimeWarning(UserWarning):
    """An asymptotic expression is used outside its high-SNR regime."""


class TruncationWarning(UserWarning):
    """The boresight series has not settled at the configured truncation order."""
