"""Shared plumbing for the experiment scripts."""

import argparse
import time
from dataclasses import dataclass, replace
from pathlib import Path

from rffso.presets import load_preset
from rffso.sweep import curve_values, emit_csv, emit_plotdata, result_columns, run_sweep


@dataclass
class FigureRun:
    preset: str
    out_dir: Path = Path("results")
    mc: bool = False
    trials: int = 1_000_000
    seed: int = 1


def parse_figure_args(preset, doc):
    ap = argparse.ArgumentParser(description=doc)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    ap.add_argument("--mc", action="store_true", help="add Monte Carlo columns")
    ap.add_argument("--trials", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=1)
    a = ap.parse_args()
    return FigureRun(preset, a.out_dir, a.mc, a.trials, a.seed)


def run_figure(run):
    spec = load_preset(run.preset)
    outputs = spec.outputs
    if run.mc:
        outputs = tuple(dict.fromkeys(outputs + tuple(
            f"{m}.mc" for m in ("outage", "asr") if any(o.startswith(m) for o in outputs))))
    spec = replace(spec, outputs=outputs, mc=replace(spec.mc, trials=run.trials, seed=run.seed))
    t0 = time.perf_counter()
    table = run_sweep(spec, progress=lambda row: print(
        f"  {row['curve']:>14s} {spec.variable}={row[table_key(spec)]:g}", flush=True))
    run.out_dir.mkdir(parents=True, exist_ok=True)
    emit_csv(table, run.out_dir / f"{run.preset}.csv")
    emit_plotdata(table, run.out_dir / f"{run.preset}.dat")
    print(f"{run.preset}: {len(table.rows)} rows in {time.perf_counter() - t0:.1f}s "
          f"-> {run.out_dir / run.preset}.{{csv,dat}}")
    return spec, table


def table_key(spec):
    return result_columns(spec)[1]


def print_curves(table, column):
    for label, vals in curve_values(table, column).items():
        print(f"{label:>14s}: " + " ".join(f"{v:.3e}" for v in vals))
