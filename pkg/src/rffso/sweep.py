"""Parameter sweeps and their tabular output."""

import csv
import math
import warnings
from dataclasses import dataclass

from .analytics import asr_exact, outage_exact
from .config import SWEEP_VARIABLES, build_scenario
from .errors import RegimeWarning
from .system import epsilon_for_irr, mc_asr, mc_outage, scenario_seed

TRUNCATION_MARKER = "# TRUNCATED: sweep interrupted"


@dataclass
class SweepResult:
    columns: tuple
    rows: list
    truncated: bool = False


def _unit_label(spec):
    return {"db": "dB", "lin": "lin", "m": "m", "": "count"}[spec.unit]


def result_columns(spec):
    cols = ["curve", f"{spec.variable}_{_unit_label(spec)}"]
    for out in spec.outputs:
        cols.append(out)
        if out.endswith(".mc"):
            cols.append(out + "_stderr")
    return tuple(cols + ["error"])


def point_values(spec, overrides, x):
    vals = dict(spec.base)
    vals.update(dict(overrides))
    kind, keys = SWEEP_VARIABLES[spec.variable]
    xv = spec.canonical_point(x)
    for key in keys:
        vals[key] = xv
    if spec.variable == "irr":
        phi_t = vals.get(("iqi", "phi_t"), 0.0)
        phi_r = vals.get(("iqi", "phi_r"), phi_t)
        vals[("iqi", "epsilon_t")] = epsilon_for_irr(xv, phi_t)
        vals[("iqi", "epsilon_r")] = epsilon_for_irr(xv, phi_r)
    return vals


def evaluate_point(scenario, outputs, mc_cfg, point_id):
    """Requested metrics for one scenario, keyed like ``spec.outputs``."""
    res = {}
    need_out = any(o.startswith("outage.") and not o.endswith(".mc") for o in outputs)
    need_asr = any(o.startswith("asr.") and not o.endswith(".mc") for o in outputs)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        if need_out:
            r = outage_exact(scenario)
            res["outage.exact"], res["outage.asymptotic"] = r.exact, r.asymptotic
        if need_asr:
            r = asr_exact(scenario)
            res["asr.exact"], res["asr.asymptotic"] = r.exact, r.asymptotic
    if "outage.mc" in outputs:
        res["outage.mc"], res["outage.mc_stderr"] = mc_outage(
            scenario, mc_cfg, scenario_seed(mc_cfg.seed, point_id + "/outage"))
    if "asr.mc" in outputs:
        res["asr.mc"], res["asr.mc_stderr"] = mc_asr(
            scenario, mc_cfg, scenario_seed(mc_cfg.seed, point_id + "/asr"))
    return res


def run_sweep(spec, progress=None):
    """Evaluate every (curve, point); per-point errors land in the ``error`` column.

    A KeyboardInterrupt returns the rows computed so far with ``truncated`` set.
    """
    cols = result_columns(spec)
    result = SweepResult(cols, [])
    try:
        for label, overrides in spec.curves:
            for x in spec.points:
                row = {"curve": label, cols[1]: x}
                try:
                    sc = build_scenario(point_values(spec, overrides, x))
                    row.update(evaluate_point(sc, spec.outputs, spec.mc, f"{spec.name}/{label}/{x!r}"))
                except Exception as exc:
                    row["error"] = f"{type(exc).__name__}: {exc}".replace("\n", " ")
                result.rows.append(row)
                if progress:
                    progress(row)
    except KeyboardInterrupt:
        result.truncated = True
    return result


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def write_csv(table, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_cell(row.get(c)) for c in table.columns])
    if table.truncated:
        fh.write(TRUNCATION_MARKER + "\n")


def emit_csv(table, path):
    """CSV with a units-labelled header in the fixed column order."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            write_csv(table, fh)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path!r}: {exc}") from exc


def read_csv(path):
    """Parse a CSV written by :func:`emit_csv` back into a table."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    cols = tuple(next(reader))
    rows = []
    for rec in reader:
        row = {}
        for c, text in zip(cols, rec):
            if text == "":
                continue
            if c in ("curve", "error"):
                row[c] = text
            else:
                row[c] = int(text) if text.lstrip("-").isdigit() else float(text)
        rows.append(row)
    return SweepResult(cols, rows)


def write_plotdata(table, fh):
    numeric = [c for c in table.columns if c not in ("curve", "error")]
    fh.write("# " + " ".join(numeric) + "\n")
    curves = list(dict.fromkeys(row["curve"] for row in table.rows))
    for i, label in enumerate(curves):
        if i:
            fh.write("\n\n")
        fh.write(f"# curve: {label}\n")
        for row in table.rows:
            if row["curve"] == label:
                vals = [row.get(c) for c in numeric]
                fh.write(" ".join("nan" if v is None else _cell(v) for v in vals) + "\n")
    if table.truncated:
        fh.write(TRUNCATION_MARKER + "\n")


def emit_plotdata(table, path):
    """Gnuplot-ready blocks: one whitespace-separated block per curve, two blank lines apart."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            write_plotdata(table, fh)
    except OSError as exc:
        raise OSError(f"cannot write plot data to {path!r}: {exc}") from exc


def curve_values(table, column):
    """{curve label: [column values in sweep order]}."""
    out = {}
    for row in table.rows:
        out.setdefault(row["curve"], []).append(row.get(column, math.nan))
    return out
