"""Two-way relay signal model with transceiver IQ imbalance and co-channel interference.

Node S1 receives over the FSO hop, node S2 over the RF hop; the relay sees
aggregate interference gamma_I. An outage occurs when either end SINR drops
below the threshold, i.e. P_out = 1 - (1 - F1)(1 - F2).
"""

import cmath
import math
import warnings
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .channels import (
    FsoLinkParams,
    InterferenceParams,
    RfLinkParams,
    fso_mean_irradiance,
    sample_fso_irradiance,
    sample_interference,
    sample_rf,
)
from .errors import ParameterError


def db_to_lin(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def lin_to_db(x):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)


# ---------------------------------------------------------------------------
# IQ imbalance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IqiParams:
    """Amplitude (epsilon) and phase (phi, radians) mismatch at transmitter and receiver.

    The transmitter uses the upper sign of K1 = (1 + eps e^{+-j phi}) / 2,
    the receiver the lower one.
    """

    epsilon_t: float = 1.0
    phi_t: float = 0.0
    epsilon_r: float = 1.0
    phi_r: float = 0.0

    def __post_init__(self):
        if not (self.epsilon_t > 0 and self.epsilon_r > 0):
            raise ParameterError("IQI amplitude mismatch must be > 0")

    @classmethod
    def symmetric(cls, epsilon, phi):
        return cls(epsilon, phi, epsilon, phi)


@dataclass(frozen=True)
class IqiCoefficients:
    k1: complex
    k2: complex
    irr: float

    @property
    def irr_db(self):
        return float(lin_to_db(self.irr))

    @property
    def k1_sq(self):
        return abs(self.k1) ** 2


def iqi_coefficients(params, side):
    """K1, K2 and the image rejection ratio for ``side`` in {"tx", "rx"}."""
    if side == "tx":
        eps, phi, sign = params.epsilon_t, params.phi_t, 1
    elif side == "rx":
        eps, phi, sign = params.epsilon_r, params.phi_r, -1
    else:
        raise ParameterError(f"side must be 'tx' or 'rx', got {side!r}")
    k1 = 0.5 * (1 + eps * cmath.exp(1j * sign * phi))
    k2 = 0.5 * (1 - eps * cmath.exp(-1j * sign * phi))
    k2_sq = abs(k2) ** 2
    # |K2|^2 = (1 + eps^2 - 2 eps cos phi) / 4 vanishes only for the ideal front end
    irr = math.inf if k2_sq < 1e-30 else abs(k1) ** 2 / k2_sq
    return IqiCoefficients(k1, k2, irr)


def irr_from_mismatch(epsilon, phi):
    c = 2 * epsilon * math.cos(phi)
    den = 1 + epsilon**2 - c
    return math.inf if den < 1e-30 else (1 + epsilon**2 + c) / den


def epsilon_for_irr(irr, phi, upper=False):
    """Amplitude mismatch giving the requested IRR at phase ``phi``.

    Two roots exist (eps and 1/eps); ``upper`` selects the one above 1.
    """
    f = lambda e: irr_from_mismatch(e, phi) - irr
    peak = 1.0
    if irr_from_mismatch(peak, phi) < irr:
        raise ParameterError(f"IRR {irr} unreachable at phase {phi}")
    return optimize.brentq(f, peak, 1e6) if upper else optimize.brentq(f, 1e-9, peak)


# ---------------------------------------------------------------------------
# SINR maps
# ---------------------------------------------------------------------------


def sinr_node1(gamma_fso, gamma_i, irr_r):
    """SINR at S1: gamma_F / (gamma_F / kappa + (1 + 1/kappa) gamma_I)."""
    gf = np.asarray(gamma_fso, dtype=float)
    gi = np.asarray(gamma_i, dtype=float)
    inv = 0.0 if math.isinf(irr_r) else 1.0 / irr_r
    den = gf * inv + (1 + inv) * gi
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(gf > 0, gf / den, 0.0)
    return float(out) if out.ndim == 0 else out


def sinr_node2(gamma_rf, gamma_i, irr_t, k1_t_sq):
    """SINR at S2: 1 / (1 / kappa + gamma_I / (gamma_RF |K1|^2))."""
    gr = np.asarray(gamma_rf, dtype=float)
    gi = np.asarray(gamma_i, dtype=float)
    inv = 0.0 if math.isinf(irr_t) else 1.0 / irr_t
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = np.where(gi > 0, gi / (gr * k1_t_sq), 0.0)
        out = np.where((gr <= 0) & (gi > 0), 0.0, 1.0 / (inv + ratio))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioParams:
    iqi: IqiParams
    rf: RfLinkParams
    fso: FsoLinkParams
    interference: InterferenceParams
    threshold: float
    rate_scale: float = 1.0  # multiplies the SINR inside log(1 + .)

    def __post_init__(self):
        if not self.threshold > 0:
            raise ParameterError("threshold must be > 0")
        if not self.rate_scale > 0:
            raise ParameterError("rate_scale must be > 0")
        if self.threshold >= self.tx.irr or self.threshold >= self.rx.irr:
            warnings.warn(
                "threshold reaches an IRR ceiling; outage saturates at 1", stacklevel=2
            )

    @property
    def tx(self):
        return iqi_coefficients(self.iqi, "tx")

    @property
    def rx(self):
        return iqi_coefficients(self.iqi, "rx")


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo controls.

    Trials are split into ``shards`` independent streams spawned from
    ``SeedSequence(seed)``; shard j processes its share in ``batch``-sized
    chunks. Estimates are reproducible for a fixed (seed, shards) pair
    regardless of ``workers``.
    """

    trials: int = 1_000_000
    seed: int = 1
    batch: int = 1 << 17
    shards: int = 1
    workers: int = 1
    shared_interference: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if self.batch < 1 or self.shards < 1 or self.workers < 1:
            raise ParameterError("batch, shards and workers must be >= 1")


def scenario_seed(seed, scenario_id):
    """Seed sequence for a named scenario: entropy (seed, crc32(scenario_id))."""
    return np.random.SeedSequence([int(seed), zlib.crc32(scenario_id.encode())])


def _draw_sinrs(scenario, rng, size, mean_irr, shared):
    fso = scenario.fso
    irr_i = sample_fso_irradiance(fso, rng, size)
    g_fso = fso.mu_rho * (irr_i / mean_irr) ** fso.rho
    g_rf = sample_rf(scenario.rf, rng, size)
    gi1 = sample_interference(scenario.interference, rng, size)
    gi2 = gi1 if shared else sample_interference(scenario.interference, rng, size)
    tx, rx = scenario.tx, scenario.rx
    return sinr_node1(g_fso, gi1, rx.irr), sinr_node2(g_rf, gi2, tx.irr, tx.k1_sq)


def _shard_sizes(cfg):
    base, extra = divmod(cfg.trials, cfg.shards)
    return [base + (j < extra) for j in range(cfg.shards)]


@dataclass
class RunningMoments:
    """Streaming count / mean / sum of squared deviations (Chan et al. merge)."""

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def push(self, x):
        x = np.asarray(x, dtype=float)
        other = RunningMoments(x.size, float(x.mean()), float(((x - x.mean()) ** 2).sum()))
        self.merge(other)

    def merge(self, o):
        if o.n == 0:
            return
        n = self.n + o.n
        d = o.mean - self.mean
        self.mean += d * o.n / n
        self.m2 += o.m2 + d * d * self.n * o.n / n
        self.n = n

    @property
    def stderr(self):
        """Delete-one jackknife standard error of the mean (equals s / sqrt(n))."""
        if self.n < 2:
            return math.nan
        return math.sqrt(self.m2 / (self.n - 1) / self.n)


def _run_shards(scenario, cfg, seed_seq, statistics):
    """Streaming moments of each ``statistics[k](s1, s2)`` over all trials."""
    mean_irr = fso_mean_irradiance(scenario.fso)
    ss = seed_seq or np.random.SeedSequence(cfg.seed)
    # spawn() is stateful; a fresh copy makes repeated calls with one seed object agree
    ss = np.random.SeedSequence(ss.entropy, spawn_key=ss.spawn_key, pool_size=ss.pool_size)
    streams = ss.spawn(cfg.shards)
    sizes = _shard_sizes(cfg)

    def shard(j):
        rng = np.random.default_rng(streams[j])
        acc = [RunningMoments() for _ in statistics]
        left = sizes[j]
        while left > 0:
            n = min(cfg.batch, left)
            s1, s2 = _draw_sinrs(scenario, rng, n, mean_irr, cfg.shared_interference)
            for a, stat in zip(acc, statistics):
                a.push(stat(s1, s2))
            left -= n
        return acc

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(shard, range(cfg.shards)))
    else:
        parts = [shard(j) for j in range(cfg.shards)]
    total = [RunningMoments() for _ in statistics]
    for part in parts:  # fixed merge order keeps results bit-reproducible
        for t, a in zip(total, part):
            t.merge(a)
    return total


def mc_outage(scenario, cfg=McConfig(), seed_seq=None):
    """Empirical P(min(SINR1, SINR2) < threshold) and its binomial standard error."""
    th = scenario.threshold
    (acc,) = _run_shards(scenario, cfg, seed_seq, [lambda s1, s2: (s1 < th) | (s2 < th)])
    p = acc.mean
    return p, math.sqrt(p * (1 - p) / acc.n)


def mc_direction_cdfs(scenario, cfg=McConfig(), seed_seq=None):
    """Empirical (P(SINR1 < th), P(SINR2 < th))."""
    th = scenario.threshold
    a1, a2 = _run_shards(
        scenario, cfg, seed_seq, [lambda s1, s2: s1 < th, lambda s1, s2: s2 < th]
    )
    return a1.mean, a2.mean


def mc_asr(scenario, cfg=McConfig(), seed_seq=None, per_direction=False):
    """Empirical sum rate R1 + R2 (bits/s/Hz) with jackknife standard error.

    With ``per_direction`` the (mean, stderr) pairs of R1 and R2 are returned too.
    """
    a = scenario.rate_scale
    r1 = lambda s1, s2: 0.5 * np.log2(1 + a * s1)
    r2 = lambda s1, s2: 0.5 * np.log2(1 + a * s2)
    tot, d1, d2 = _run_shards(
        scenario, cfg, seed_seq, [lambda s1, s2: r1(s1, s2) + r2(s1, s2), r1, r2]
    )
    if per_direction:
        return (tot.mean, tot.stderr), (d1.mean, d1.stderr), (d2.mean, d2.stderr)
    return tot.mean, tot.stderr


def sample_sinrs(scenario, rng, size, shared_interference=False):
    """Raw (SINR1, SINR2) draws, for empirical-CDF checks."""
    mean_irr = fso_mean_irradiance(scenario.fso)
    return _draw_sinrs(scenario, rng, size, mean_irr, shared_interference)
