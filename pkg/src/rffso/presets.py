"""Baseline scenario and figure presets.

Values the figures state are pinned. Everything else is listed in
:data:`UNSTATED`, and the preset files in ``preset_files/`` carry the marker
``DEFAULT (paper-unstated)`` next to each such key.
"""

import math
from dataclasses import replace
from importlib import resources

from .channels import (
    DggTurbulenceParams,
    FsoLinkParams,
    InterferenceParams,
    PointingErrorParams,
    RfLinkParams,
)
from .system import IqiParams, ScenarioParams, db_to_lin

UNSTATED_MARKER = "DEFAULT (paper-unstated)"

# moderate turbulence; alpha1 / alpha2 = 2 gives a 3-term Meijer kernel
BASE_TURBULENCE = DggTurbulenceParams(
    alpha1=2.0, beta1=1.5, omega1=1.0, alpha2=1.0, beta2=2.5, omega2=1.0
)
# jitter chosen so that xi ~ 1; boresight half the jitter
BASE_POINTING = PointingErrorParams(
    boresight=0.2, jitter=0.4, beam_waist=0.8, aperture_radius=0.1
)

UNSTATED = {
    "fso.turbulence": "alpha1=2 beta1=1.5 omega1=1 alpha2=1 beta2=2.5 omega2=1",
    "fso.pointing": "boresight=0.2 m jitter=0.4 m beam_waist=0.8 m aperture_radius=0.1 m",
    "fso.rho": "2 (IM/DD)",
    "fso.bessel_truncation": "10",
    "scenario.threshold": "0 dB",
    "interference (fig1, fig3)": "N=2 m_I=2.3 mean INR 0 dB",
    "iqi.phi_r": "equal to phi_t",
    "rf.a, rf.v": "7/2 (the larger of the two stated pairs)",
}

# amplitude mismatch paired with the IRR it produces at a 3 degree phase error
IRR_TO_EPSILON_3DEG = {10: 0.521, 15: 1.425, 20: 1.213}


def iqi_for_irr_db(irr_db, phi_deg=3.0):
    if irr_db is None or math.isinf(irr_db):
        return IqiParams()
    return IqiParams.symmetric(IRR_TO_EPSILON_3DEG[irr_db], math.radians(phi_deg))


def baseline(
    snr_db=30.0,
    irr_db=20,
    n_interferers=2,
    inr_db=0.0,
    m_i=2.3,
    rho=2,
    boresight=None,
    a=3.5,
    v=3.5,
    threshold_db=0.0,
    bessel_truncation=10,
    iqi=None,
):
    """Reference scenario with equal mean SNR on both hops."""
    snr = float(db_to_lin(snr_db))
    pointing = BASE_POINTING if boresight is None else replace(BASE_POINTING, boresight=boresight)
    return ScenarioParams(
        iqi=iqi if iqi is not None else iqi_for_irr_db(irr_db),
        rf=RfLinkParams(a=a, v=v, mean_snr=snr),
        fso=FsoLinkParams(
            turbulence=BASE_TURBULENCE,
            pointing=pointing,
            rho=rho,
            mu_rho=snr,
            bessel_truncation=bessel_truncation,
        ),
        interference=InterferenceParams(
            count=n_interferers, m=m_i, mean_inr=float(db_to_lin(inr_db))
        ),
        threshold=float(db_to_lin(threshold_db)),
    )


PRESET_NAMES = ("fig1", "fig2", "fig3")


def preset_text(name):
    if name not in PRESET_NAMES:
        raise KeyError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    return (resources.files("rffso") / "preset_files" / f"{name}.ini").read_text("utf-8")


def load_preset(name):
    """The figure preset as a :class:`rffso.config.SweepSpec`."""
    from .config import sweep_from_config

    return sweep_from_config(preset_text(name), name=name)


def preset_description(name):
    first = preset_text(name).splitlines()[0]
    return first.lstrip("; ").strip()
