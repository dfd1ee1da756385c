"""Numerical special-function kernel: gamma family, Bessel, Meijer G."""

from .bessel import bessel_i0_series_coeffs, bessel_k, i0_series, i0_series_magnitudes
from .gamma import log_gamma_complex, polygamma, polygamma_complex
from .meijer import (
    log_meijer_g,
    DEFAULT_CONTOUR,
    MAX_DERIVATIVE_ORDER,
    ContourConfig,
    GammaFactor,
    MeijerGSpec,
    MellinBarnes,
    meijer_g,
    meijer_g_param_deriv,
)

__all__ = [
    "ContourConfig",
    "DEFAULT_CONTOUR",
    "GammaFactor",
    "MAX_DERIVATIVE_ORDER",
    "MeijerGSpec",
    "MellinBarnes",
    "bessel_i0_series_coeffs",
    "bessel_k",
    "i0_series",
    "i0_series_magnitudes",
    "log_gamma_complex",
    "log_meijer_g",
    "meijer_g",
    "meijer_g_param_deriv",
    "polygamma",
    "polygamma_complex",
]
