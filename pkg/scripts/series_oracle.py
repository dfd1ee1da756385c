"""Series density of the FSO irradiance against the brute-force conditioning integral.

For each boresight and truncation order, prints the worst relative error
over a log grid around E[I]. The error should shrink with the truncation
order until it reaches the quadrature floor.
"""

import argparse
import warnings

import numpy as np
from scipy import integrate

from rffso.channels import (
    dgg_atmospheric_pdf,
    fso_combined_pdf,
    fso_mean_irradiance,
    pointing_error_pdf,
)
from rffso.errors import TruncationWarning
from rffso.presets import baseline


def conditioning_pdf(fso, x):
    turb, pt = fso.turbulence, fso.pointing
    f = lambda ip: pointing_error_pdf(pt, ip) * dgg_atmospheric_pdf(turb, x / ip) / ip
    pts = [pt.A0 * t for t in (1e-3, 1e-2, 0.1, 0.5, 0.9)]
    return integrate.quad(f, 0, pt.A0, points=pts, limit=400, epsabs=0, epsrel=1e-9)[0]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--boresight", type=float, nargs="+", default=[0.0, 0.2, 0.4])
    ap.add_argument("--orders", type=int, nargs="+", default=[2, 4, 6, 10, 14])
    ap.add_argument("--points", type=int, default=12)
    a = ap.parse_args()
    warnings.simplefilter("ignore", TruncationWarning)  # low orders are the point here

    print(f"{'b [m]':>6s} {'n':>3s} {'max rel err':>12s}")
    for b in a.boresight:
        ref_fso = baseline(boresight=b).fso
        xs = fso_mean_irradiance(ref_fso) * np.logspace(-1.3, 0.7, a.points)
        ref = np.array([conditioning_pdf(ref_fso, x) for x in xs])
        for n in a.orders:
            fso = baseline(boresight=b, bessel_truncation=n).fso
            err = np.max(np.abs(np.asarray(fso_combined_pdf(fso, xs)) / ref - 1))
            print(f"{b:6.2f} {n:3d} {err:12.3e}")


if __name__ == "__main__":
    main()
