"""Channel statistics for the RF hop, the co-channel interference and the FSO hop.

Conventions
-----------
RF hop (K-distribution).  gamma_RF = A2 * G * E with G ~ Gamma(v + 1, 1),
E ~ Exp(1) and A2 = 4 a**2 * mean_snr, so that the density is
proportional to gamma**(v/2) K_v(sqrt(gamma / (a**2 mean_snr))).
``mean_snr`` is the scale parameter of that density; the actual mean is
A2 * (v + 1).

Interference.  gamma_I is Gamma(N m_I, mean_inr / m_I), the sum of N
i.i.d. Nakagami-m powers.

FSO hop.  I = I_a * I_p.  I_a = I_x I_y with I_x = (Gamma(beta) Omega / beta)**(1/alpha).
I_p = A0 exp(-2 r**2 / w_zeq**2), r the radial displacement of a Gaussian
spot with boresight offset b and per-axis jitter sigma_s.

The composite FSO density replaces I_0 in the pointing-error density with
the finite-n series of :func:`rffso.specfun.bessel_i0_series_coeffs`. Each
series term becomes a parameter derivative (in q = -xi**2) of a single
Meijer G-function:

    f(I) = P / I * sum_m W_m d^m/dq^m G^{M+1,0}_{1,M+1}[I**y / (D2 A0**y) | 1 - q/y; tau0, -q/y]

with M = lambda + sigma, P = D1 xi**2 exp(-b**2 / 2 sigma_s**2) / y and
W_m = -(-1)**m B[m, n].  The electrical SNR is gamma_FSO = mu * (I / E[I])**rho.
"""

import math
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import ParameterError, TruncationWarning
from .specfun import (
    DEFAULT_CONTOUR,
    MeijerGSpec,
    bessel_i0_series_coeffs,
    i0_series_magnitudes,
)

PROB_CLAMP_SILENT = 1e-6
PROB_CLAMP_RAISE = 1e-4


def clamp_probability(p):
    """Clamp numerical residue outside [0, 1]; larger excursions are errors."""
    if p < -PROB_CLAMP_RAISE or p > 1.0 + PROB_CLAMP_RAISE:
        raise ParameterError(f"probability {p!r} outside [0, 1] beyond tolerance")
    return min(max(p, 0.0), 1.0)


def _scalar_or_array(fn, x):
    xa = np.asarray(x, dtype=float)
    if xa.ndim == 0:
        return fn(float(xa))
    return np.array([fn(float(v)) for v in xa.ravel()]).reshape(xa.shape)


# ---------------------------------------------------------------------------
# RF hop
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RfLinkParams:
    a: float
    v: float
    mean_snr: float

    def __post_init__(self):
        if not self.a > 0:
            raise ParameterError("K-distribution shape a must be > 0")
        if not self.v > -1:
            raise ParameterError("K-distribution order v must be > -1")
        if not self.mean_snr > 0:
            raise ParameterError("mean_snr must be > 0")

    @property
    def A2(self):
        return 4.0 * self.mean_snr * self.a**2

    @property
    def A1(self):
        """Density prefactor such that f = A1 gamma**(v/2) K_v(...)."""
        return 2.0 / (
            (2 * self.a) ** (self.v + 2) * special.gamma(self.v + 1)
            * self.mean_snr ** ((self.v + 2) / 2)
        )

    def moment(self, s):
        """E[gamma_RF**s] for s > -min(1, v + 1)."""
        v = self.v
        return self.A2**s * math.exp(
            special.gammaln(v + 1 + s) + special.gammaln(1 + s) - special.gammaln(v + 1)
        )


def rf_pdf(params, gamma):
    """Density of the K-distributed RF SNR."""
    v, A2 = params.v, params.A2

    def one(g):
        if g < 0:
            return 0.0
        if g == 0:
            return 0.0 if v > 0 else math.inf
        x = 2.0 * math.sqrt(g / A2)
        logf = (
            math.log(2.0) - special.gammaln(v + 1) - math.log(A2)
            + 0.5 * v * math.log(g / A2) + math.log(special.kve(v, x)) - x
        )
        return math.exp(logf)

    return _scalar_or_array(one, gamma)


def rf_cdf_spec(params):
    """Meijer G representation: F(gamma) = G^{2,1}_{1,3}[gamma/A2 | 1; v+1, 1, 0] / Gamma(v+1)."""
    return MeijerGSpec(2, 1, (1.0,), (params.v + 1.0, 1.0, 0.0))


def rf_cdf(params, gamma, cfg=DEFAULT_CONTOUR):
    spec = rf_cdf_spec(params)
    norm = math.exp(-special.gammaln(params.v + 1))

    def one(g):
        if g <= 0:
            return 0.0
        mant, ls, _ = spec.integrand().integrate_scaled(g / params.A2, cfg=cfg)
        return clamp_probability(norm * mant * math.exp(ls))

    return _scalar_or_array(one, gamma)


def rf_ccdf_closed(params, gamma):
    """1 - F via 2 x**((v+1)/2) K_{v+1}(2 sqrt x) / Gamma(v+1), x = gamma / A2."""
    x = np.asarray(gamma, dtype=float) / params.A2
    v = params.v
    with np.errstate(divide="ignore"):
        out = 2.0 * np.exp(
            0.5 * (v + 1) * np.log(x) + np.log(special.kve(v + 1, 2 * np.sqrt(x)))
            - 2 * np.sqrt(x) - special.gammaln(v + 1)
        )
    return np.where(x > 0, out, 1.0)


def sample_rf(params, rng, size=None):
    """Draws of gamma_RF: an exponential power with a Gamma-distributed local mean."""
    g = rng.gamma(params.v + 1.0, 1.0, size)
    e = rng.exponential(1.0, size)
    return params.A2 * g * e


# ---------------------------------------------------------------------------
# Co-channel interference
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InterferenceParams:
    count: int
    m: float
    mean_inr: float

    def __post_init__(self):
        if self.count < 0 or int(self.count) != self.count:
            raise ParameterError("interferer count must be a non-negative integer")
        if not self.m >= 0.5:
            raise ParameterError("Nakagami shape m must be >= 0.5")
        if not self.mean_inr > 0:
            raise ParameterError("mean_inr must be > 0")
        object.__setattr__(self, "count", int(self.count))

    @property
    def shape(self):
        return self.count * self.m

    @property
    def scale(self):
        return self.mean_inr / self.m


def interference_pdf(params, x):
    if params.count == 0:
        raise ParameterError("interference density is degenerate for zero interferers")
    k, th = params.shape, params.scale
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        logf = (k - 1) * np.log(x) - x / th - k * math.log(th) - special.gammaln(k)
    out = np.where(x > 0, np.exp(logf), 0.0 if k > 1 else (math.inf if k < 1 else 1 / th))
    return float(out) if out.ndim == 0 else out


def sample_interference(params, rng, size=None):
    """Aggregate INR as the sum of ``count`` squared-Nakagami draws."""
    if params.count == 0:
        return np.zeros(size) if size is not None else 0.0
    shape = (params.count,) if size is None else (params.count,) + tuple(np.atleast_1d(size))
    draws = rng.gamma(params.m, params.scale, shape)
    return draws.sum(axis=0)


# ---------------------------------------------------------------------------
# FSO: double generalized-Gamma turbulence
# ---------------------------------------------------------------------------


def _delta(k, x):
    """[x/k, (x+1)/k, ..., (x+k-1)/k]."""
    return tuple((x + j) / k for j in range(k))


@dataclass(frozen=True)
class DggTurbulenceParams:
    alpha1: float
    beta1: float
    omega1: float
    alpha2: float
    beta2: float
    omega2: float
    max_denominator: int = 7

    def __post_init__(self):
        for name in ("alpha1", "beta1", "omega1", "alpha2", "beta2", "omega2"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be > 0")
        ratio = self.alpha1 / self.alpha2
        frac = Fraction(ratio).limit_denominator(self.max_denominator)
        if abs(float(frac) - ratio) > 1e-9 * ratio:
            raise ParameterError(
                f"alpha1/alpha2 = {ratio!r} is not a ratio of integers with "
                f"denominator <= {self.max_denominator}"
            )
        object.__setattr__(self, "_frac", frac)

    @property
    def lam(self):
        return self._frac.numerator

    @property
    def sigma(self):
        return self._frac.denominator

    @property
    def y(self):
        return self.alpha2 * self.lam

    @property
    def D1(self):
        lam, sig = self.lam, self.sigma
        return self.y * math.exp(
            (self.beta1 - 0.5) * math.log(sig) + (self.beta2 - 0.5) * math.log(lam)
            + (1 - (sig + lam) / 2) * math.log(2 * math.pi)
            - special.gammaln(self.beta1) - special.gammaln(self.beta2)
        )

    @property
    def D2(self):
        lam, sig = self.lam, self.sigma
        return (lam**lam * sig**sig * self.omega1**sig * self.omega2**lam) / (
            self.beta1**sig * self.beta2**lam
        )

    @property
    def tau0(self):
        return _delta(self.sigma, self.beta1) + _delta(self.lam, self.beta2)

    def moment(self, s):
        """E[I_a**s] from the Gamma-ratio (Mellin) formula."""
        a1, b1, o1, a2, b2, o2 = (self.alpha1, self.beta1, self.omega1,
                                  self.alpha2, self.beta2, self.omega2)
        return math.exp(
            special.gammaln(b1 + s / a1) - special.gammaln(b1)
            + special.gammaln(b2 + s / a2) - special.gammaln(b2)
            + (s / a1) * math.log(o1 / b1) + (s / a2) * math.log(o2 / b2)
        )

    def pdf_spec(self):
        return MeijerGSpec(self.lam + self.sigma, 0, (), self.tau0)


def dgg_atmospheric_pdf(params, i_a, cfg=DEFAULT_CONTOUR):
    """Density of I_a = I_x I_y: (D1 / I) G^{M,0}_{0,M}[I**y / D2 | -; tau0]."""
    mb = params.pdf_spec().integrand()
    logD1 = math.log(params.D1)

    def one(x):
        if x <= 0:
            return 0.0
        mant, ls, _ = mb.integrate_scaled(x**params.y / params.D2, cfg=cfg)
        return mant * math.exp(ls + logD1 - math.log(x))

    return _scalar_or_array(one, i_a)


def sample_gg(alpha, beta, omega, rng, size=None):
    return (rng.gamma(beta, 1.0, size) * omega / beta) ** (1.0 / alpha)


def sample_dgg(params, rng, size=None):
    p = params
    return sample_gg(p.alpha1, p.beta1, p.omega1, rng, size) * sample_gg(
        p.alpha2, p.beta2, p.omega2, rng, size
    )


# ---------------------------------------------------------------------------
# FSO: pointing error with boresight
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PointingErrorParams:
    boresight: float
    jitter: float
    beam_waist: float
    aperture_radius: float

    def __post_init__(self):
        if not self.boresight >= 0:
            raise ParameterError("boresight must be >= 0")
        for name in ("jitter", "beam_waist", "aperture_radius"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be > 0")

    @property
    def v_geom(self):
        return math.sqrt(math.pi) * self.aperture_radius / (2 * self.beam_waist)

    @property
    def A0(self):
        return math.erf(self.v_geom) ** 2

    @property
    def w_zeq(self):
        v = self.v_geom
        return math.sqrt(
            self.beam_waist**2 * math.sqrt(math.pi) * math.erf(v) / (2 * v * math.exp(-(v**2)))
        )

    @property
    def xi(self):
        return self.w_zeq / (2 * self.jitter)

    @property
    def boresight_loss(self):
        """exp(-b**2 / 2 sigma_s**2)."""
        return math.exp(-self.boresight**2 / (2 * self.jitter**2))

    @property
    def series_base(self):
        """(b xi / (sqrt 2 sigma_s))**2, the per-order growth of the I_0 series."""
        return (self.boresight * self.xi / (math.sqrt(2) * self.jitter)) ** 2

    def moment(self, s):
        """Exact E[I_p**s] = xi^2 A0^s e^{-b^2/2s^2} exp(K / (s + xi^2)) / (s + xi^2)."""
        xi2 = self.xi**2
        return (
            xi2 * self.A0**s * self.boresight_loss
            * math.exp(self.series_base / (s + xi2)) / (s + xi2)
        )


def pointing_error_pdf(params, i_p):
    """Boresight pointing-error density on (0, A0); exactly 0 elsewhere."""
    A0, xi2 = params.A0, params.xi**2
    b, s2 = params.boresight, params.jitter**2
    wz2 = params.w_zeq**2
    x = np.asarray(i_p, dtype=float)
    inside = (x > 0) & (x < A0)
    xs = np.where(inside, x, A0 / 2)
    arg = (b / s2) * np.sqrt(np.maximum(-wz2 * np.log(xs / A0) / 2, 0.0))
    logf = (
        math.log(xi2) - xi2 * math.log(A0) - b**2 / (2 * s2)
        + (xi2 - 1) * np.log(xs) + np.log(special.i0e(arg)) + arg
    )
    out = np.where(inside, np.exp(logf), 0.0)
    return float(out) if out.ndim == 0 else out


def sample_pointing(params, rng, size=None):
    """Gaussian beam offsets (b, 0) + N(0, sigma_s^2) per axis, mapped to I_p."""
    dx = rng.normal(params.boresight, params.jitter, size)
    dy = rng.normal(0.0, params.jitter, size)
    r2 = dx * dx + dy * dy
    return params.A0 * np.exp(-2.0 * r2 / params.w_zeq**2)


# ---------------------------------------------------------------------------
# FSO: composite link
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FsoLinkParams:
    turbulence: DggTurbulenceParams
    pointing: PointingErrorParams
    rho: int = 2
    mu_rho: float = 10.0
    bessel_truncation: int = 10

    def __post_init__(self):
        if self.rho not in (1, 2):
            raise ParameterError("demodulation order rho must be 1 or 2")
        if not self.mu_rho > 0:
            raise ParameterError("mu_rho must be > 0")
        if self.bessel_truncation < 1 or int(self.bessel_truncation) != self.bessel_truncation:
            raise ParameterError("bessel_truncation must be a positive integer")


@dataclass(frozen=True)
class FsoSeries:
    """Derived constants of the composite FSO density.

    ``B`` are the signed series constants B[m, n]; ``weights`` the factors
    multiplying d^m/dq^m of the base G-function. Fields may be overridden
    (``dataclasses.replace``) to probe sensitivity to each constant.
    """

    prefactor: float
    y: float
    scale: float  # D2 * A0**y
    tau0: tuple
    q: float
    B: tuple
    mean_irradiance: float
    weights: tuple = field(init=False)

    def __post_init__(self):
        w = tuple(-((-1) ** m) * bm for m, bm in enumerate(self.B))
        object.__setattr__(self, "weights", w)

    @property
    def M(self):
        return len(self.tau0)

    def pdf_spec(self):
        y, q = self.y, self.q
        return MeijerGSpec(self.M + 1, 0, (1 - q / y,), self.tau0 + (-q / y,))

    def pdf_sensitivity(self):
        return np.array([-1 / self.y]), np.r_[np.zeros(self.M), -1 / self.y]

    def cdf_spec(self):
        y, q = self.y, self.q
        return MeijerGSpec(self.M + 1, 1, (1.0, 1 - q / y), self.tau0 + (-q / y, 0.0))

    def cdf_sensitivity(self):
        return np.array([0.0, -1 / self.y]), np.r_[np.zeros(self.M), -1 / self.y, 0.0]


def bessel_series_constants(pointing, n):
    """B[m, n] = b_hat[m, n] * (b xi / (sqrt 2 sigma_s))**(2m), m = 0..n."""
    base = pointing.series_base
    return tuple(bessel_i0_series_coeffs(n, m) * base**m for m in range(n + 1))


def _series_mean_pointing(pointing, n):
    xi2 = pointing.xi**2
    c = i0_series_magnitudes(n)
    base = pointing.series_base
    tot = sum(
        c[m] * base**m * math.factorial(m) / (1 + xi2) ** (m + 1) for m in range(n + 1)
    )
    return xi2 * pointing.boresight_loss * pointing.A0 * tot


def fso_mean_irradiance(params):
    """E[I] of the composite (series) density: E[I_a] * E_series[I_p]."""
    return params.turbulence.moment(1.0) * _series_mean_pointing(
        params.pointing, params.bessel_truncation
    )


TRUNCATION_DRIFT_LIMIT = 1e-4


@lru_cache(maxsize=256)
def _density_drift(params):
    """Relative change of the density at E[I] from truncation n to n + 2."""
    wider = replace(params, bessel_truncation=params.bessel_truncation + 2)
    x = fso_mean_irradiance(params)
    a = fso_combined_pdf(params, x, series=fso_series(params, check=False))
    b = fso_combined_pdf(wider, x, series=fso_series(wider, check=False))
    return abs(a / b - 1)


def fso_series(params, check=True):
    """Series constants; warns (TruncationWarning) if n -> n + 2 moves the density by > 1e-4."""
    if check and _density_drift(params) > TRUNCATION_DRIFT_LIMIT:
        warnings.warn(
            f"boresight series drifts by {_density_drift(params):.1e} between truncation "
            f"{params.bessel_truncation} and {params.bessel_truncation + 2}",
            TruncationWarning, stacklevel=2,
        )
    t, p = params.turbulence, params.pointing
    return FsoSeries(
        prefactor=t.D1 * p.xi**2 * p.boresight_loss / t.y,
        y=t.y,
        scale=t.D2 * p.A0**t.y,
        tau0=t.tau0,
        q=-(p.xi**2),
        B=bessel_series_constants(p, params.bessel_truncation),
        mean_irradiance=fso_mean_irradiance(params),
    )


def fso_combined_pdf(params, i, cfg=DEFAULT_CONTOUR, series=None):
    """Density of the composite irradiance I = I_a I_p (series form)."""
    sr = series or fso_series(params)
    da, db = sr.pdf_sensitivity()
    mb = sr.pdf_spec().integrand(da, db)

    def one(x):
        if x <= 0:
            return 0.0
        mant, ls, _ = mb.integrate_scaled(x**sr.y / sr.scale, weights=sr.weights, cfg=cfg)
        return max(sr.prefactor * mant * math.exp(ls) / x, 0.0)

    return _scalar_or_array(one, i)


def fso_irradiance_cdf(params, x, cfg=DEFAULT_CONTOUR, series=None):
    """P(I <= x) = (P / y) sum_m W_m d^m/dq^m G^{M+1,1}_{2,M+2}[x**y / (D2 A0**y)]."""
    sr = series or fso_series(params)
    da, db = sr.cdf_sensitivity()
    mb = sr.cdf_spec().integrand(da, db)

    def one(v):
        if v <= 0:
            return 0.0
        mant, ls, _ = mb.integrate_scaled(v**sr.y / sr.scale, weights=sr.weights, cfg=cfg)
        return clamp_probability(sr.prefactor / sr.y * mant * math.exp(ls))

    return _scalar_or_array(one, x)


def fso_snr_scale(params, series=None):
    """D4 such that F_FSO(gamma) = F_G(D4 * gamma**(y / rho)); see :func:`fso_snr_cdf`."""
    sr = series or fso_series(params)
    return (sr.mean_irradiance**sr.y / sr.scale) / params.mu_rho ** (sr.y / params.rho)


def fso_snr_cdf(params, gamma, cfg=DEFAULT_CONTOUR, series=None, d4=None):
    """CDF of gamma_FSO = mu_rho * (I / E[I])**rho."""
    sr = series or fso_series(params)
    D4 = fso_snr_scale(params, sr) if d4 is None else d4
    da, db = sr.cdf_sensitivity()
    mb = sr.cdf_spec().integrand(da, db)

    def one(g):
        if g <= 0:
            return 0.0
        arg = D4 * g ** (sr.y / params.rho)
        mant, ls, _ = mb.integrate_scaled(arg, weights=sr.weights, cfg=cfg)
        return clamp_probability(sr.prefactor / sr.y * mant * math.exp(ls))

    return _scalar_or_array(one, gamma)


def fso_snr_from_irradiance(params, irradiance, mean_irradiance=None):
    ei = fso_mean_irradiance(params) if mean_irradiance is None else mean_irradiance
    return params.mu_rho * (np.asarray(irradiance) / ei) ** params.rho


def sample_fso_irradiance(params, rng, size=None):
    return sample_dgg(params.turbulence, rng, size) * sample_pointing(params.pointing, rng, size)


def fso_truncation_drift(params, gamma, cfg=DEFAULT_CONTOUR):
    """Relative change of fso_snr_cdf between truncation n and n + 2."""
    a = fso_snr_cdf(params, gamma, cfg)
    b = fso_snr_cdf(replace(params, bessel_truncation=params.bessel_truncation + 2), gamma, cfg)
    return abs(a - b) / max(abs(b), 1e-300)
