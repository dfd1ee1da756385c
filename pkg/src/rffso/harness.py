"""Cross-validation of the closed forms against the Monte Carlo engine."""

import csv
import io
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .analytics import analytic_constants, asr_exact, outage_exact
from .errors import RegimeWarning
from .presets import baseline
from .system import McConfig, mc_asr, mc_outage, scenario_seed

REPORT_COLUMNS = (
    "scenario_id", "metric", "analytic", "asymptotic",
    "mc_estimate", "mc_stderr", "z_score", "pass", "error",
)
Z_LIMIT = 3.0
ASR_REL_BAND = 0.02


@dataclass(frozen=True)
class ReportRow:
    scenario_id: str
    metric: str
    analytic: float = math.nan
    asymptotic: float = math.nan
    mc_estimate: float = math.nan
    mc_stderr: float = math.nan
    z_score: float = math.nan
    passed: bool = False
    error: str = ""


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    def failures(self):
        return [r for r in self.rows if not r.passed]

    def to_csv(self):
        buf = io.StringIO()
        for k, v in self.metadata.items():
            buf.write(f"# {k}={v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in self.rows:
            w.writerow([
                r.scenario_id, r.metric, _fmt(r.analytic), _fmt(r.asymptotic),
                _fmt(r.mc_estimate), _fmt(r.mc_stderr), _fmt(r.z_score),
                "1" if r.passed else "0", r.error,
            ])
        return buf.getvalue()

    def summary(self):
        n_fail = len(self.failures())
        lines = [
            f"validation: {len(self.rows) - n_fail}/{len(self.rows)} rows pass "
            f"(|z| <= {Z_LIMIT:g}; rates also within {ASR_REL_BAND:.0%})",
            *(f"  {k}: {v}" for k, v in self.metadata.items()),
        ]
        for r in self.failures():
            why = r.error or f"z={r.z_score:.3g}"
            lines.append(f"  FAIL {r.scenario_id} {r.metric}: {why}")
        return "\n".join(lines) + "\n"

    def write(self, path):
        """Write the CSV to ``path`` and the summary to ``path`` + '.summary.txt'."""
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(self.to_csv())
            with open(f"{path}.summary.txt", "w", encoding="utf-8") as fh:
                fh.write(self.summary())
        except OSError as exc:
            raise OSError(f"cannot write report to {path!r}: {exc}") from exc


def _fmt(x):
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else repr(float(x))


def judge(metric, analytic, mc, stderr, trials):
    """(z_score, pass) under the per-metric tolerance."""
    # an all-or-nothing Monte Carlo outcome has zero sample variance; fall back to 1/trials
    se = stderr if stderr > 0 else 1.0 / trials
    z = (analytic - mc) / se
    if metric == "outage":
        return z, abs(z) <= Z_LIMIT
    return z, abs(analytic - mc) <= Z_LIMIT * se + ASR_REL_BAND * abs(mc)


def _row(sid, metric, scenario, cfg, mutate):
    try:
        const = analytic_constants(scenario)
        if mutate is not None:
            const = mutate(const)
        seed = scenario_seed(cfg.seed, f"{sid}/{metric}")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            if metric == "outage":
                res = outage_exact(scenario, constants=const)
                est, se = mc_outage(scenario, cfg, seed)
            else:
                res = asr_exact(scenario, constants=const)
                est, se = mc_asr(scenario, cfg, seed)
        z, ok = judge(metric, res.exact, est, se, cfg.trials)
        return ReportRow(sid, metric, res.exact, res.asymptotic, est, se, z, ok)
    except Exception as exc:  # a failing scenario must not abort the grid
        return ReportRow(sid, metric, error=f"{type(exc).__name__}: {exc}".replace("\n", " "))


def run_validation(grid, cfg=McConfig(), metrics=("outage", "asr"), mutate=None, workers=1):
    """One report row per (scenario, metric).

    ``grid`` is a sequence of (scenario_id, ScenarioParams). ``mutate`` maps
    the analytic constants to a perturbed copy before evaluation.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("validation grid is empty")
    jobs = [(sid, m, sc) for sid, sc in grid for m in metrics]
    run = lambda job: _row(job[0], job[1], job[2], cfg, mutate)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(run, jobs))
    else:
        rows = [run(j) for j in jobs]
    meta = {"package": f"rffso {__version__}", "seed": cfg.seed, "trials": cfg.trials}
    return ValidationReport(tuple(rows), meta)


def default_grid(snr_db=15.0):
    """Twelve scenarios: IRR {10, 20, inf} dB x N {2, 3} x mean INR {0, -5} dB,
    alternating boresight (0 / 0.2 m) and demodulation order (1 / 2)."""
    out = []
    i = 0
    for irr in (10, 20, None):
        for n in (2, 3):
            for inr in (0.0, -5.0):
                b = 0.0 if (i + i // 4) % 2 == 0 else 0.2
                rho = 1 if (i // 2) % 2 == 0 else 2
                tag = "inf" if irr is None else str(irr)
                sid = f"irr{tag}_N{n}_inr{inr:g}_b{b:g}_rho{rho}"
                out.append((sid, baseline(snr_db=snr_db, irr_db=irr, n_interferers=n,
                                          inr_db=inr, boresight=b, rho=rho)))
                i += 1
    return out
