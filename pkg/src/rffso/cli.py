"""Command-line interface: ``rffso {eval,sweep,validate,preset}``.

Exit codes: 0 success, 1 configuration or I/O error, 2 numerical failure,
3 validation failure.
"""

import argparse
import sys
from dataclasses import replace

from . import __version__
from .config import (
    OUTPUTS,
    SweepSpec,
    build_scenario,
    load_scenario,
    scenario_values,
    sweep_from_config,
)
from .errors import ConfigError, RffsoError
from .harness import default_grid, run_validation
from .presets import PRESET_NAMES, load_preset, preset_description
from .sweep import emit_csv, emit_plotdata, point_values, run_sweep, write_csv, write_plotdata
from .system import McConfig

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3


def _common(p):
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "plotdata"), default="csv")
    p.add_argument("--seed", type=int, help="Monte Carlo seed (overrides config)")
    p.add_argument("--trials", type=int, help="Monte Carlo trials (overrides config)")


def build_parser():
    ap = argparse.ArgumentParser(prog="rffso", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"rffso {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one scenario")
    p.add_argument("--config", required=True)
    p.add_argument("--mc", action="store_true", help="add Monte Carlo estimates")
    _common(p)

    p = sub.add_parser("sweep", help="run a sweep file")
    p.add_argument("--config", required=True)
    _common(p)

    p = sub.add_parser("validate", help="closed forms vs Monte Carlo on a scenario grid")
    p.add_argument("--config", help="sweep file whose points form the grid (default: built-in grid)")
    p.add_argument("--out", help="report CSV path; a .summary.txt is written next to it")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--trials", type=int, default=1_000_000)

    p = sub.add_parser("preset", help="list or run figure presets")
    psub = p.add_subparsers(dest="action", required=True)
    psub.add_parser("list")
    pr = psub.add_parser("run")
    pr.add_argument("name", choices=PRESET_NAMES)
    pr.add_argument("--mc", action="store_true", help="add Monte Carlo columns")
    _common(pr)
    return ap


def _mc_override(mc, args):
    if args.seed is not None:
        mc = replace(mc, seed=args.seed)
    if args.trials is not None:
        mc = replace(mc, trials=args.trials)
    return mc


def _emit(table, args):
    if args.out:
        (emit_csv if args.format == "csv" else emit_plotdata)(table, args.out)
    else:
        (write_csv if args.format == "csv" else write_plotdata)(table, sys.stdout)


def _with_mc(outputs, on):
    if not on:
        return outputs
    extra = tuple(f"{m}.mc" for m in ("outage", "asr") if any(o.startswith(m) for o in outputs))
    return tuple(dict.fromkeys(outputs + extra))


def _table_errors(table):
    return [r["error"] for r in table.rows if r.get("error")]


def cmd_eval(args):
    scenario, mc = load_scenario(args.config)
    outputs = tuple(o for o in OUTPUTS if not o.endswith(".mc"))
    spec = SweepSpec(
        variable="threshold", unit="lin", points=(scenario.threshold,),
        base=scenario_values(scenario), outputs=_with_mc(outputs, args.mc),
        mc=_mc_override(mc, args), name="eval",
    )
    return _finish(run_sweep(spec), args)


def _finish(table, args):
    _emit(table, args)
    errs = _table_errors(table)
    if errs:
        print(f"rffso: {len(errs)} point(s) failed: {errs[0]}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_sweep(args):
    spec = sweep_from_config(args.config)
    spec = replace(spec, mc=_mc_override(spec.mc, args))
    return _finish(run_sweep(spec), args)


def cmd_validate(args):
    if args.config:
        spec = sweep_from_config(args.config)
        grid = [
            (f"{label}@{x!r}", build_scenario(point_values(spec, ov, x)))
            for label, ov in spec.curves for x in spec.points
        ]
    else:
        grid = default_grid()
    report = run_validation(grid, McConfig(trials=args.trials, seed=args.seed))
    if args.out:
        report.write(args.out)
    else:
        sys.stdout.write(report.to_csv())
    sys.stderr.write(report.summary())
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_preset(args):
    if args.action == "list":
        for name in PRESET_NAMES:
            print(f"{name}\t{preset_description(name)}")
        return EXIT_OK
    spec = load_preset(args.name)
    spec = replace(spec, outputs=_with_mc(spec.outputs, args.mc), mc=_mc_override(spec.mc, args))
    return _finish(run_sweep(spec), args)


COMMANDS = {"eval": cmd_eval, "sweep": cmd_sweep, "validate": cmd_validate, "preset": cmd_preset}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"rffso: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"rffso: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RffsoError as exc:
        print(f"rffso: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
