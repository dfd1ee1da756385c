"""Closed-form outage probability and achievable sum rate.

Every quantity is a (sum of parameter derivatives of a) Mellin-Barnes
integral. ``method="quadrature"`` evaluates the defining one-dimensional
integral instead and serves as the oracle for the closed forms.

Direction 1 (FSO hop to S1). With W = gamma_F / gamma_I and kappa = IRR at
the receiver, SINR1 < g  <=>  gamma_F < c(g) gamma_I,
c(g) = g (kappa + 1) / (kappa - g). Averaging the FSO SNR CDF over the Gamma
interference adds one factor Gamma(k + (y / rho) s) to its Mellin integrand.

Direction 2 (RF hop to S2). SINR2 < g  <=>  gamma_RF < d(g) gamma_I,
d(g) = g / (|K1|^2 (1 - g / kappa)), giving
F2 = G^{2,2}_{2,3}[d theta / A2 | 1, 1 - k; v + 1, 1, 0] / (Gamma(v + 1) Gamma(k)).

Rates. ln(1 + D SINR1) = ln(1 + W (1 + D kappa)/(kappa + 1)) - ln(1 + W/(kappa + 1))
and similarly for direction 2, so each rate is a difference of two values
of E[ln(1 + alpha X)], computed from ln(1 + x) = G^{1,2}_{2,2}[x | 1, 1; 1, 0].
"""

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, special

from .channels import (
    FsoSeries,
    clamp_probability,
    fso_series,
    fso_snr_cdf,
    fso_snr_scale,
    interference_pdf,
    rf_ccdf_closed,
)
from .errors import ModelMismatchError, ParameterError, RegimeWarning
from .specfun import DEFAULT_CONTOUR, GammaFactor, MeijerGSpec, MellinBarnes

HIGH_SNR_FLOOR_DB = 20.0
ASR_ORACLE_TOL = 0.02
LN2 = math.log(2.0)


@dataclass(frozen=True)
class AnalyticConstants:
    """Every derived constant the closed forms consume.

    Built once per scenario by :func:`analytic_constants`; :meth:`perturbed`
    returns a copy with one constant scaled, which the validation harness
    uses to prove it detects transcription errors.
    """

    series: FsoSeries
    d4: float
    rho: int
    k: float  # interference shape N m_I
    theta: float  # interference scale
    rf_scale: float  # A2
    rf_order: float  # v
    k1t_sq: float
    irr_t: float
    irr_r: float
    rate_scale: float = 1.0

    def perturbed(self, name, factor, index=None):
        if name == "B":
            b = list(self.series.B)
            b[index] *= factor
            return replace(self, series=replace(self.series, B=tuple(b)))
        if name == "tau0":
            t = list(self.series.tau0)
            t[index] *= factor
            return replace(self, series=replace(self.series, tau0=tuple(t)))
        if name in ("d4", "k", "theta", "rf_scale", "k1t_sq"):
            return replace(self, **{name: getattr(self, name) * factor})
        raise ParameterError(f"unknown constant {name!r}")


def analytic_constants(scenario):
    sr = fso_series(scenario.fso)
    tx, rx = scenario.tx, scenario.rx
    return AnalyticConstants(
        series=sr,
        d4=fso_snr_scale(scenario.fso, sr),
        rho=scenario.fso.rho,
        k=scenario.interference.shape,
        theta=scenario.interference.scale,
        rf_scale=scenario.rf.A2,
        rf_order=scenario.rf.v,
        k1t_sq=tx.k1_sq,
        irr_t=tx.irr,
        irr_r=rx.irr,
        rate_scale=scenario.rate_scale,
    )


@dataclass(frozen=True)
class OutageResult:
    exact: float
    asymptotic: float
    per_direction: tuple
    per_direction_asymptotic: tuple


@dataclass(frozen=True)
class AsrResult:
    exact: float
    asymptotic: float
    r1: float
    r2: float


# ---------------------------------------------------------------------------
# Thresholds
# ---------------------------------------------------------------------------


def _fso_threshold(gamma, irr):
    return gamma if math.isinf(irr) else gamma * (irr + 1) / (irr - gamma)


def _rf_threshold(gamma, irr, k1_sq):
    return gamma / k1_sq if math.isinf(irr) else gamma / (k1_sq * (1 - gamma / irr))


# ---------------------------------------------------------------------------
# Mellin-Barnes assemblies
# ---------------------------------------------------------------------------


def dir1_integrand(const):
    """F1 integrand: the FSO SNR CDF kernel plus the interference average."""
    sr = const.series
    da, db = sr.cdf_sensitivity()
    return sr.cdf_spec().integrand(da, db) + MellinBarnes(
        (GammaFactor(const.k, sr.y / const.rho),)
    )


def dir1_argument(const, gamma):
    c = _fso_threshold(gamma, const.irr_r)
    return const.d4 * (c * const.theta) ** (const.series.y / const.rho)


def dir1_prefactor(const):
    return const.series.prefactor / const.series.y / special.gamma(const.k)


def dir2_spec(const):
    return MeijerGSpec(2, 2, (1.0, 1.0 - const.k), (const.rf_order + 1.0, 1.0, 0.0))


def dir2_argument(const, gamma):
    d = _rf_threshold(gamma, const.irr_t, const.k1t_sq)
    return d * const.theta / const.rf_scale


def dir2_prefactor(const):
    return math.exp(-special.gammaln(const.rf_order + 1) - special.gammaln(const.k))


def _eval(mb, z, weights, cfg):
    mant, ls, _ = mb.integrate_scaled(z, weights=weights, cfg=cfg)
    return mant * math.exp(ls)


def _saturation(scenario, gamma, irr):
    if scenario.interference.count == 0:
        return 1.0 if gamma >= irr else 0.0
    return 1.0 if gamma >= irr else None


# ---------------------------------------------------------------------------
# Direction CDFs
# ---------------------------------------------------------------------------


def cdf_dir1(scenario, gamma, method="closed", constants=None, cfg=DEFAULT_CONTOUR):
    """P(SINR at S1 < gamma)."""
    const = constants or analytic_constants(scenario)
    sat = _saturation(scenario, gamma, const.irr_r)
    if sat is not None:
        return sat
    if method == "quadrature":
        c = _fso_threshold(gamma, const.irr_r)
        sr = fso_series(scenario.fso)
        f = lambda x: float(fso_snr_cdf(scenario.fso, c * x, cfg, series=sr)) * interference_pdf(
            scenario.interference, x
        )
        return clamp_probability(_quad_halfline(f, const.k * const.theta))
    z = dir1_argument(const, gamma)
    val = dir1_prefactor(const) * _eval(dir1_integrand(const), z, const.series.weights, cfg)
    return clamp_probability(val)


def cdf_dir2(scenario, gamma, method="closed", constants=None, cfg=DEFAULT_CONTOUR):
    """P(SINR at S2 < gamma)."""
    const = constants or analytic_constants(scenario)
    sat = _saturation(scenario, gamma, const.irr_t)
    if sat is not None:
        return sat
    if method == "quadrature":
        d = _rf_threshold(gamma, const.irr_t, const.k1t_sq)
        f = lambda x: (1.0 - float(rf_ccdf_closed(scenario.rf, d * x))) * interference_pdf(
            scenario.interference, x
        )
        return clamp_probability(_quad_halfline(f, const.k * const.theta))
    z = dir2_argument(const, gamma)
    val = dir2_prefactor(const) * _eval(dir2_spec(const).integrand(), z, None, cfg)
    return clamp_probability(val)


def _quad_halfline(f, scale):
    """Integral over (0, inf) split at multiples of the natural scale."""
    edges = [0.0, 0.25 * scale, scale, 4 * scale, 16 * scale, 64 * scale]
    total = sum(
        integrate.quad(f, lo, hi, limit=200, epsabs=0, epsrel=1e-8)[0]
        for lo, hi in zip(edges[:-1], edges[1:])
    )
    return total + integrate.quad(f, edges[-1], np.inf, limit=200)[0]


# ---------------------------------------------------------------------------
# Outage
# ---------------------------------------------------------------------------


def _mean_snr_db(scenario):
    return 10 * math.log10(min(scenario.rf.mean_snr, scenario.fso.mu_rho))


def _check_regime(scenario, floor_db):
    if _mean_snr_db(scenario) < floor_db:
        warnings.warn(
            f"mean SNR below {floor_db} dB: asymptotic expression outside its regime",
            RegimeWarning,
            stacklevel=3,
        )


def _asymptotic_dirs(scenario, const):
    g = scenario.threshold
    out = []
    for irr, mb, z, w, pref in (
        (const.irr_r, dir1_integrand(const), dir1_argument(const, g),
         const.series.weights, dir1_prefactor(const)),
        (const.irr_t, dir2_spec(const).integrand(), dir2_argument(const, g),
         None, dir2_prefactor(const)),
    ):
        sat = _saturation(scenario, g, irr)
        out.append(sat if sat is not None else pref * mb.residue_expansion(z, "right", w))
    return tuple(out)


def outage_asymptotic(scenario, constants=None, floor_db=HIGH_SNR_FLOOR_DB):
    """High-SNR outage: leading small-argument residue of each direction, summed."""
    _check_regime(scenario, floor_db)
    const = constants or analytic_constants(scenario)
    f1, f2 = _asymptotic_dirs(scenario, const)
    return min(f1 + f2, 1.0)


def outage_exact(scenario, method="closed", constants=None, cfg=DEFAULT_CONTOUR):
    """Outage 1 - (1 - F1)(1 - F2) with both direction CDFs at the threshold."""
    const = constants or analytic_constants(scenario)
    g = scenario.threshold
    f1 = cdf_dir1(scenario, g, method, const, cfg)
    f2 = cdf_dir2(scenario, g, method, const, cfg)
    p = clamp_probability(1.0 - (1.0 - f1) * (1.0 - f2))
    a1, a2 = _asymptotic_dirs(scenario, const)
    return OutageResult(p, min(a1 + a2, 1.0), (f1, f2), (a1, a2))


# ---------------------------------------------------------------------------
# Achievable sum rate
# ---------------------------------------------------------------------------

# ln(1 + x) = G^{1,2}_{2,2}[x | 1, 1; 1, 0]
_LOG1P = MeijerGSpec(1, 2, (1.0, 1.0), (1.0, 0.0))


def _log_kernel_fso(const):
    sr = const.series
    r = const.rho / sr.y
    q = sr.q
    return _LOG1P.integrand() + MellinBarnes(
        tuple(GammaFactor(t, r) for t in sr.tau0)
        + (
            GammaFactor(-q / sr.y, r, 1, -1 / sr.y),
            GammaFactor(1 - q / sr.y, r, -1, -1 / sr.y),
            GammaFactor(const.k, -1.0),
        )
    )


def _log_kernel_rf(const):
    return _LOG1P.integrand() + MellinBarnes(
        (
            GammaFactor(const.rf_order + 1, 1.0),
            GammaFactor(1.0, 1.0),
            GammaFactor(const.k, -1.0),
        )
    )


def _rate_terms(const):
    """(kernel, argument scale, weights, prefactor, alphas) for each direction.

    E[ln(1 + alpha X)] = prefactor * kernel(alpha * scale); the rate is the
    first alpha's value minus the second's.
    """
    sr = const.series
    dlt = const.rate_scale

    def alphas(irr):
        if math.isinf(irr):
            return (dlt,)
        return ((1 + dlt * irr) / (irr + 1), 1 / (irr + 1))

    def alphas_rf(irr):
        if math.isinf(irr):
            return (dlt,)
        return ((1 + dlt * irr) / irr, 1 / irr)

    return (
        (
            _log_kernel_fso(const),
            1.0 / (const.theta * const.d4 ** (const.rho / sr.y)),
            sr.weights,
            sr.prefactor / sr.y / special.gamma(const.k),
            alphas(const.irr_r),
        ),
        (
            _log_kernel_rf(const),
            const.k1t_sq * const.rf_scale / const.theta,
            None,
            math.exp(-special.gammaln(const.rf_order + 1) - special.gammaln(const.k)),
            alphas_rf(const.irr_t),
        ),
    )


def _ceiling_rate(irr, dlt):
    if math.isinf(irr):
        raise ParameterError("rate is unbounded without interference and with ideal IQI")
    return 0.5 * math.log2(1 + dlt * irr)


def _rates(scenario, const, evaluate):
    if scenario.interference.count == 0:
        return (_ceiling_rate(const.irr_r, const.rate_scale),
                _ceiling_rate(const.irr_t, const.rate_scale))
    out = []
    for mb, scale, w, pref, al in _rate_terms(const):
        vals = [pref * evaluate(mb, a * scale, w) for a in al]
        nats = vals[0] - (vals[1] if len(vals) > 1 else 0.0)
        out.append(max(nats, 0.0) / (2 * LN2))
    return tuple(out)


def _rate_quadrature(scenario, const, cfg):
    """R_i = (1 / 2 ln 2) int_0^kappa D (1 - F_i(x)) / (1 + D x) dx."""
    dlt = const.rate_scale
    out = []
    for cdf, irr in ((cdf_dir1, const.irr_r), (cdf_dir2, const.irr_t)):
        f = lambda x: dlt * (1.0 - cdf(scenario, x, "closed", const, cfg)) / (1 + dlt * x)
        if math.isinf(irr):
            val = integrate.quad(f, 0, np.inf, limit=400, epsrel=1e-7)[0]
        else:
            pts = [irr * t for t in (1e-4, 1e-2, 0.1, 0.5, 0.9)]
            val = integrate.quad(f, 0, irr, points=pts, limit=400, epsrel=1e-7)[0]
        out.append(val / (2 * LN2))
    return tuple(out)


def asr_asymptotic(scenario, constants=None, floor_db=HIGH_SNR_FLOOR_DB):
    """High-SNR sum rate from the double pole at s = 0 of each log kernel."""
    _check_regime(scenario, floor_db)
    const = constants or analytic_constants(scenario)
    r1, r2 = _rates(
        scenario, const, lambda mb, z, w: mb.residue_expansion(z, "left", w)
    )
    return r1 + r2


def asr_exact(scenario, method="closed", constants=None, cfg=DEFAULT_CONTOUR, check=False):
    """Sum rate R1 + R2 in bits/s/Hz.

    With ``check`` the closed form is compared against the quadrature oracle
    and :class:`ModelMismatchError` is raised beyond a 2% disagreement.
    """
    const = constants or analytic_constants(scenario)
    if method == "quadrature" and scenario.interference.count > 0:
        r1, r2 = _rate_quadrature(scenario, const, cfg)
    else:
        r1, r2 = _rates(scenario, const, lambda mb, z, w: _eval(mb, z, w, cfg))
    if check and method == "closed" and scenario.interference.count > 0:
        q1, q2 = _rate_quadrature(scenario, const, cfg)
        if abs((r1 + r2) - (q1 + q2)) > ASR_ORACLE_TOL * abs(q1 + q2):
            raise ModelMismatchError(
                f"closed-form rate {r1 + r2:.6g} vs quadrature {q1 + q2:.6g}"
            )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        asym = asr_asymptotic(scenario, const)
    return AsrResult(r1 + r2, asym, r1, r2)
