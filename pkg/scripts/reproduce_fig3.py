"""Achievable sum rate vs equal-hop SNR with Monte Carlo overlay (fig3 preset).

The preset already requests ``asr.mc``; ``--trials`` trades accuracy for time.
"""

from _common import parse_figure_args, print_curves, run_figure
from rffso.sweep import curve_values


def main():
    _, table = run_figure(parse_figure_args("fig3", __doc__))
    print_curves(table, "asr.exact")
    if "asr.mc" in table.columns:
        print("Monte Carlo:")
        print_curves(table, "asr.mc")
        exact, mc = curve_values(table, "asr.exact"), curve_values(table, "asr.mc")
        se = curve_values(table, "asr.mc_stderr")
        worst = max(
            abs(a - m) / (3 * s + 0.02 * abs(m))
            for k in exact for a, m, s in zip(exact[k], mc[k], se[k])
        )
        print(f"worst |exact - mc| / (3 SE + 2%): {worst:.3f}")


if __name__ == "__main__":
    main()
