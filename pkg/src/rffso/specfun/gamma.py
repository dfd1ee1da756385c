"""Gamma-family functions on the complex plane.

``log_gamma_complex`` wraps :func:`scipy.special.loggamma` (principal branch)
and adds pole detection. ``polygamma_complex`` is implemented here because
SciPy only provides real-argument polygamma of order >= 1, while the
Mellin-Barnes parameter derivatives need it along complex contours.
"""

import math

import numpy as np
from scipy import special

from ..errors import GammaPoleError, ParameterError

# Re(z) is shifted up to this value before the asymptotic series is used.
_ASYMPTOTIC_SHIFT = 30.0
_N_BERNOULLI = 10
_BERNOULLI_EVEN = special.bernoulli(2 * _N_BERNOULLI)[2::2]  # B_2, B_4, ..., B_20

MAX_POLYGAMMA_ORDER = 16


def _check_poles(z):
    z = np.asarray(z)
    zr = np.real(z)
    bad = (np.imag(z) == 0) & (zr <= 0) & (zr == np.round(zr))
    if np.any(bad):
        raise GammaPoleError(f"gamma pole at {z[bad].ravel()[0]}")


def log_gamma_complex(z):
    """Principal-branch log Gamma for complex (or real) ``z``.

    Returns a complex scalar or array. Raises GammaPoleError at
    non-positive integers.
    """
    z = np.asarray(z, dtype=complex)
    _check_poles(z)
    out = special.loggamma(z)
    return out.item() if out.ndim == 0 else out


def _polygamma_asymptotic(k, w):
    w2inv = 1.0 / (w * w)
    if k == 0:
        acc = np.log(w) - 0.5 / w
        p = np.ones_like(w)
        for j in range(1, _N_BERNOULLI + 1):
            p = p * w2inv
            acc = acc - _BERNOULLI_EVEN[j - 1] / (2 * j) * p
        return acc
    acc = math.factorial(k - 1) / w**k + math.factorial(k) / (2 * w ** (k + 1))
    p = 1.0 / w**k
    for j in range(1, _N_BERNOULLI + 1):
        p = p * w2inv
        coef = _BERNOULLI_EVEN[j - 1] * math.factorial(2 * j + k - 1) / math.factorial(2 * j)
        acc = acc + coef * p
    return (-1) ** (k + 1) * acc


def polygamma_complex(k, z):
    """k-th derivative of the digamma function for complex ``z``.

    Upward recurrence to Re(z) >= 30, then the Bernoulli asymptotic series.
    """
    if k < 0 or int(k) != k:
        raise ParameterError("polygamma order must be a non-negative integer")
    if k > MAX_POLYGAMMA_ORDER:
        raise ParameterError(f"polygamma order capped at {MAX_POLYGAMMA_ORDER}")
    k = int(k)
    z = np.asarray(z, dtype=complex)
    _check_poles(z)
    shape = z.shape
    z = z.ravel()
    # a common shift for all points: over-shifting only improves the asymptotic series
    n = int(max(0.0, math.ceil(_ASYMPTOTIC_SHIFT - z.real.min(initial=_ASYMPTOTIC_SHIFT))))
    corr = (
        (z[:, None] + np.arange(n)) ** (-(k + 1))).sum(axis=1) if n else np.zeros_like(z)
    out = _polygamma_asymptotic(k, z + n) - (-1) ** k * math.factorial(k) * corr
    out = out.reshape(shape)
    return out.item() if out.ndim == 0 else out


def polygamma_orders(kmax, z):
    """[psi^(0)(z), ..., psi^(kmax)(z)] sharing one recurrence table."""
    if kmax > MAX_POLYGAMMA_ORDER:
        raise ParameterError(f"polygamma order capped at {MAX_POLYGAMMA_ORDER}")
    z = np.asarray(z, dtype=complex)
    _check_poles(z)
    shape = z.shape
    z = z.ravel()
    n = int(max(0.0, math.ceil(_ASYMPTOTIC_SHIFT - z.real.min(initial=_ASYMPTOTIC_SHIFT))))
    inv = 1.0 / (z[:, None] + np.arange(n))
    pw = inv
    out = []
    for k in range(kmax + 1):
        corr = pw.sum(axis=1)
        val = _polygamma_asymptotic(k, z + n) - (-1) ** k * math.factorial(k) * corr
        out.append(val.reshape(shape))
        pw = pw * inv
    return out


def polygamma(order, x):
    """Real polygamma psi^(order)(x) for x > 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ParameterError("polygamma requires x > 0")
    out = np.real(polygamma_complex(order, xa))
    return float(out) if np.ndim(out) == 0 else out
