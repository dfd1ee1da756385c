"""Closed forms vs Monte Carlo on the 12-scenario grid, plus a mutation check.

Writes the validation report (CSV + summary) and, with ``--mutations``, the
number of failing rows after scaling each derived constant by 10%.
"""

import argparse
import time
from pathlib import Path

from rffso.harness import default_grid, run_validation
from rffso.system import McConfig

MUTATIONS = (("d4", None), ("k", None), ("B", 0), ("B", 1), ("theta", None), ("rf_scale", None))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/validation.csv"))
    ap.add_argument("--trials", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--snr-db", type=float, default=15.0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--mutations", action="store_true")
    a = ap.parse_args()

    grid = default_grid(a.snr_db)
    cfg = McConfig(trials=a.trials, seed=a.seed)
    t0 = time.perf_counter()
    rep = run_validation(grid, cfg, workers=a.workers)
    a.out.parent.mkdir(parents=True, exist_ok=True)
    rep.write(str(a.out))
    print(rep.summary(), end="")
    print(f"({time.perf_counter() - t0:.0f}s) report: {a.out}")

    if a.mutations:
        for name, idx in MUTATIONS:
            m = run_validation(grid, cfg, metrics=("outage",), workers=a.workers,
                               mutate=lambda c, n=name, i=idx: c.perturbed(n, 1.1, i))
            tag = name if idx is None else f"{name}[{idx}]"
            print(f"mutation {tag:>9s} x1.1: {len(m.failures()):2d}/{len(m.rows)} rows fail")


if __name__ == "__main__":
    main()
