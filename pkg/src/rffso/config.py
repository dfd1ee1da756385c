"""Scenario and sweep configuration files.

INI syntax (``configparser``) with sections mirroring the parameter types::

    [scenario]          threshold, rate_scale
    [iqi]               epsilon_t, phi_t, epsilon_r, phi_r
    [rf]                a, v, mean_snr
    [interference]      count, m, mean_inr
    [fso]               rho, mean_snr, bessel_truncation
    [fso.turbulence]    alpha1, beta1, omega1, alpha2, beta2, omega2
    [fso.pointing]      boresight, jitter, beam_waist, aperture_radius
    [mc]                trials, seed, batch, shards

Every non-integer key carries a unit suffix: ``_db`` or ``_lin`` for power
ratios, ``_lin`` for dimensionless shapes, ``_deg`` or ``_rad`` for angles
and ``_m`` for lengths. ``fso.mean_snr`` defaults to ``rf.mean_snr`` (equal
hop SNRs). Sweep files add a ``[sweep]`` section and optional
``[curve.<label>]`` sections whose keys are ``section.key_suffix`` overrides.
"""

import configparser
import math
from dataclasses import dataclass, field

from .channels import (
    DggTurbulenceParams,
    FsoLinkParams,
    InterferenceParams,
    PointingErrorParams,
    RfLinkParams,
)
from .errors import ConfigError, RffsoError
from .system import IqiParams, McConfig, ScenarioParams

RATIO, SCALAR, ANGLE, LENGTH, INT = "ratio", "scalar", "angle", "length", "int"

_SUFFIXES = {
    RATIO: ("_db", "_lin"),
    SCALAR: ("_lin",),
    ANGLE: ("_deg", "_rad"),
    LENGTH: ("_m",),
    INT: ("",),
}

# (section, name) -> (kind, default); None marks a required key
SCHEMA = {
    ("scenario", "threshold"): (RATIO, 1.0),
    ("scenario", "rate_scale"): (SCALAR, 1.0),
    ("iqi", "epsilon_t"): (SCALAR, 1.0),
    ("iqi", "phi_t"): (ANGLE, 0.0),
    ("iqi", "epsilon_r"): (SCALAR, 1.0),
    ("iqi", "phi_r"): (ANGLE, 0.0),
    ("rf", "a"): (SCALAR, None),
    ("rf", "v"): (SCALAR, None),
    ("rf", "mean_snr"): (RATIO, None),
    ("interference", "count"): (INT, None),
    ("interference", "m"): (SCALAR, None),
    ("interference", "mean_inr"): (RATIO, None),
    ("fso", "rho"): (INT, 2),
    ("fso", "mean_snr"): (RATIO, "rf.mean_snr"),
    ("fso", "bessel_truncation"): (INT, 10),
    ("fso.turbulence", "alpha1"): (SCALAR, None),
    ("fso.turbulence", "beta1"): (SCALAR, None),
    ("fso.turbulence", "omega1"): (SCALAR, None),
    ("fso.turbulence", "alpha2"): (SCALAR, None),
    ("fso.turbulence", "beta2"): (SCALAR, None),
    ("fso.turbulence", "omega2"): (SCALAR, None),
    ("fso.pointing", "boresight"): (LENGTH, None),
    ("fso.pointing", "jitter"): (LENGTH, None),
    ("fso.pointing", "beam_waist"): (LENGTH, None),
    ("fso.pointing", "aperture_radius"): (LENGTH, None),
    ("mc", "trials"): (INT, 1_000_000),
    ("mc", "seed"): (INT, 1),
    ("mc", "batch"): (INT, 1 << 17),
    ("mc", "shards"): (INT, 1),
}

_CANONICAL_SUFFIX = {RATIO: "_lin", SCALAR: "_lin", ANGLE: "_rad", LENGTH: "_m", INT: ""}


def _to_canonical(kind, suffix, text, where):
    try:
        if kind == INT:
            return int(text)
        x = float(text)
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {text!r}") from exc
    if suffix == "_db":
        return 10.0 ** (x / 10.0)
    if suffix == "_deg":
        return math.radians(x)
    return x


def _split_key(section, key):
    for (sec, name), (kind, _) in SCHEMA.items():
        if sec != section:
            continue
        for suf in _SUFFIXES[kind]:
            if key == name + suf:
                return name, kind, suf
    raise ConfigError(f"[{section}] unknown key or missing unit suffix: {key!r}")


def _parser():
    return configparser.ConfigParser(
        inline_comment_prefixes=(";", "#"), interpolation=None, default_section="__none__"
    )


def read_config(source):
    """Parse a path or an INI string into a ConfigParser."""
    cp = _parser()
    try:
        if "\n" in source or "[" in source:
            cp.read_string(source)
        else:
            with open(source, encoding="utf-8") as fh:
                cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {source!r}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return cp


def canonical_values(cp, sections=None):
    """Flat {(section, name): canonical value} of the schema sections present."""
    out = {}
    for sec in cp.sections():
        if sec in ("sweep",) or sec.startswith("curve."):
            continue
        if not any(s == sec for s, _ in SCHEMA):
            raise ConfigError(f"unknown section [{sec}]")
        for key, text in cp.items(sec):
            name, kind, suf = _split_key(sec, key)
            if (sec, name) in out:
                raise ConfigError(f"[{sec}] {name} given twice")
            out[(sec, name)] = _to_canonical(kind, suf, text, f"[{sec}] {key}")
    return out


def parse_override(dotted, text):
    sec, _, key = dotted.rpartition(".")
    if not sec:
        raise ConfigError(f"override {dotted!r} must be section.key")
    name, kind, suf = _split_key(sec, key)
    return (sec, name), _to_canonical(kind, suf, text, dotted)


def _resolve(values):
    full = {}
    for key, (_, default) in SCHEMA.items():
        if key in values:
            full[key] = values[key]
        elif default is None:
            raise ConfigError(f"[{key[0]}] missing required key {key[1]!r}")
        else:
            full[key] = default
    ref = SCHEMA[("fso", "mean_snr")][1]
    if isinstance(full[("fso", "mean_snr")], str):
        full[("fso", "mean_snr")] = full[tuple(ref.split("."))]
    return full


def build_scenario(values):
    """ScenarioParams from canonical values; invariant violations become ConfigError."""
    v = _resolve(values)
    g = lambda sec, name: v[(sec, name)]
    try:
        return ScenarioParams(
            iqi=IqiParams(g("iqi", "epsilon_t"), g("iqi", "phi_t"),
                          g("iqi", "epsilon_r"), g("iqi", "phi_r")),
            rf=RfLinkParams(g("rf", "a"), g("rf", "v"), g("rf", "mean_snr")),
            fso=FsoLinkParams(
                turbulence=DggTurbulenceParams(
                    *(g("fso.turbulence", k)
                      for k in ("alpha1", "beta1", "omega1", "alpha2", "beta2", "omega2"))
                ),
                pointing=PointingErrorParams(
                    *(g("fso.pointing", k)
                      for k in ("boresight", "jitter", "beam_waist", "aperture_radius"))
                ),
                rho=g("fso", "rho"),
                mu_rho=g("fso", "mean_snr"),
                bessel_truncation=g("fso", "bessel_truncation"),
            ),
            interference=InterferenceParams(
                g("interference", "count"), g("interference", "m"),
                g("interference", "mean_inr"),
            ),
            threshold=g("scenario", "threshold"),
            rate_scale=g("scenario", "rate_scale"),
        )
    except RffsoError as exc:
        raise ConfigError(str(exc)) from exc


def build_mc(values):
    v = _resolve_partial(values, "mc")
    try:
        return McConfig(trials=v["trials"], seed=v["seed"], batch=v["batch"], shards=v["shards"])
    except RffsoError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_partial(values, section):
    return {
        name: values.get((sec, name), default)
        for (sec, name), (_, default) in SCHEMA.items()
        if sec == section
    }


def scenario_values(scenario, mc=None):
    """Inverse of :func:`build_scenario` (canonical units)."""
    s = scenario
    t, p = s.fso.turbulence, s.fso.pointing
    out = {
        ("scenario", "threshold"): s.threshold,
        ("scenario", "rate_scale"): s.rate_scale,
        ("iqi", "epsilon_t"): s.iqi.epsilon_t,
        ("iqi", "phi_t"): s.iqi.phi_t,
        ("iqi", "epsilon_r"): s.iqi.epsilon_r,
        ("iqi", "phi_r"): s.iqi.phi_r,
        ("rf", "a"): s.rf.a,
        ("rf", "v"): s.rf.v,
        ("rf", "mean_snr"): s.rf.mean_snr,
        ("interference", "count"): s.interference.count,
        ("interference", "m"): s.interference.m,
        ("interference", "mean_inr"): s.interference.mean_inr,
        ("fso", "rho"): s.fso.rho,
        ("fso", "mean_snr"): s.fso.mu_rho,
        ("fso", "bessel_truncation"): s.fso.bessel_truncation,
    }
    for k in ("alpha1", "beta1", "omega1", "alpha2", "beta2", "omega2"):
        out[("fso.turbulence", k)] = getattr(t, k)
    for k in ("boresight", "jitter", "beam_waist", "aperture_radius"):
        out[("fso.pointing", k)] = getattr(p, k)
    if mc is not None:
        for k in ("trials", "seed", "batch", "shards"):
            out[("mc", k)] = getattr(mc, k)
    return out


def emit_config(values, comments=None):
    """INI text with canonical suffixes; floats use repr so parsing is exact."""
    comments = comments or {}
    lines = []
    current = None
    for (sec, name), (kind, _) in SCHEMA.items():
        if (sec, name) not in values:
            continue
        if sec != current:
            if current is not None:
                lines.append("")
            lines.append(f"[{sec}]")
            current = sec
        val = values[(sec, name)]
        text = str(int(val)) if kind == INT else repr(float(val))
        note = comments.get((sec, name))
        lines.append(f"{name}{_CANONICAL_SUFFIX[kind]} = {text}" + (f"  ; {note}" if note else ""))
    return "\n".join(lines) + "\n"


def load_scenario(source):
    cp = read_config(source)
    vals = canonical_values(cp)
    return build_scenario(vals), build_mc(vals)


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

SWEEP_VARIABLES = {
    # variable -> (kind, canonical keys it sets)
    "snr": (RATIO, (("rf", "mean_snr"), ("fso", "mean_snr"))),
    "inr": (RATIO, (("interference", "mean_inr"),)),
    "threshold": (RATIO, (("scenario", "threshold"),)),
    "count": (INT, (("interference", "count"),)),
    "boresight": (LENGTH, (("fso.pointing", "boresight"),)),
    "irr": (RATIO, ()),  # handled by mismatch inversion at the configured phase
}

OUTPUTS = (
    "outage.exact", "outage.asymptotic", "outage.mc",
    "asr.exact", "asr.asymptotic", "asr.mc",
)


@dataclass(frozen=True)
class SweepSpec:
    """A one-variable sweep over a base scenario, optionally per curve."""

    variable: str
    unit: str  # "db", "lin", "m" or "" (integer)
    points: tuple  # in the declared unit
    base: dict
    curves: tuple = (("base", ()),)
    outputs: tuple = ("outage.exact",)
    mc: McConfig = field(default_factory=McConfig)
    name: str = "sweep"

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"unknown sweep variable {self.variable!r}")
        if not self.points:
            raise ConfigError("sweep range is empty")
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad:
            raise ConfigError(f"unknown outputs {bad}")

    def canonical_point(self, x):
        if self.unit == "db":
            return 10.0 ** (x / 10.0)
        if self.unit == "":
            return int(x)
        return float(x)


def _frange(start, stop, step):
    if not step > 0:
        raise ConfigError("sweep step must be > 0")
    if stop < start:
        raise ConfigError("sweep range is empty")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 12) for i in range(n))


def sweep_from_config(source, name="sweep"):
    cp = read_config(source)
    if not cp.has_section("sweep"):
        raise ConfigError("sweep file needs a [sweep] section")
    sw = dict(cp.items("sweep"))
    var = sw.pop("variable", None)
    if var not in SWEEP_VARIABLES:
        raise ConfigError(f"unknown sweep variable {var!r}")
    kind = SWEEP_VARIABLES[var][0]
    unit = None
    for suf in _SUFFIXES[kind]:
        if f"start{suf}" in sw:
            unit = suf.lstrip("_")
            try:
                start, stop, step = (float(sw.pop(f"{k}{suf}")) for k in ("start", "stop", "step"))
            except KeyError as exc:
                raise ConfigError(f"[sweep] missing {exc.args[0]}") from exc
            except ValueError as exc:
                raise ConfigError(f"[sweep] {exc}") from exc
            break
    if unit is None:
        raise ConfigError(f"[sweep] needs start/stop/step with one of {_SUFFIXES[kind]}")
    outputs = tuple(o.strip() for o in sw.pop("outputs", "outage.exact").split(",") if o.strip())
    sw.pop("description", None)
    if sw:
        raise ConfigError(f"[sweep] unknown keys {sorted(sw)}")
    base = canonical_values(cp)
    curves = []
    for sec in cp.sections():
        if sec.startswith("curve."):
            ov = tuple(parse_override(k, t) for k, t in cp.items(sec))
            curves.append((sec[len("curve."):], ov))
    return SweepSpec(
        variable=var,
        unit=unit,
        points=_frange(start, stop, step),
        base=base,
        curves=tuple(curves) or (("base", ()),),
        outputs=outputs,
        mc=build_mc(base),
        name=name,
    )
