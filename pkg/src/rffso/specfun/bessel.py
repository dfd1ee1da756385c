import math
from fractions import Fraction

import numpy as np
from scipy import special

from ..errors import OverflowSignal, ParameterError


def bessel_k(order, x):
    """Modified Bessel function of the second kind K_order(x), x > 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ParameterError("bessel_k requires x > 0")
    out = special.kv(order, xa)
    if np.any(~np.isfinite(out)):
        raise OverflowSignal(f"K_{order}(x) overflows double precision")
    return float(out) if out.ndim == 0 else out


def bessel_i0_series_coeffs(n, m):
    """Signed coefficient b_hat[m, n] of the finite-n series for I_0.

    b_hat[m, n] = (-1)**(m+1) (n+m-1)! n**(1-2m) / (m! (n-m)! Gamma(m+1)).

    The magnitudes approximate 1/(m!)**2, so that
    ``-sum_m b_hat[m, n] * (-(x/2)**2)**m`` approximates I_0(x). The
    alternating sign pairs with powers of the (negative) logarithm that
    appear when the series is inserted into the pointing-error density.
    """
    if n < 1 or int(n) != n:
        raise ParameterError("truncation order n must be a positive integer")
    if m < 0 or int(m) != m:
        raise ParameterError("index m must be a non-negative integer")
    if m > n:
        raise IndexError(f"m={m} exceeds truncation order n={n}")
    n, m = int(n), int(m)
    f = math.factorial
    mag = Fraction(f(n + m - 1), f(m) * f(n - m) * f(m)) * Fraction(n) ** (1 - 2 * m)
    return float((-1) ** (m + 1) * mag)


def i0_series_magnitudes(n):
    """Positive weights c_m = |b_hat[m, n]| for m = 0..n."""
    return np.array([abs(bessel_i0_series_coeffs(n, m)) for m in range(n + 1)])


def i0_series(x, n):
    """Finite-n approximation of I_0(x) built from ``bessel_i0_series_coeffs``."""
    x = np.asarray(x, dtype=float)
    u = (x / 2.0) ** 2
    c = i0_series_magnitudes(n)
    return np.polynomial.polynomial.polyval(u, c)
