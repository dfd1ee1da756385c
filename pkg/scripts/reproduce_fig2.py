"""Outage vs equal-hop SNR for N in {2, 3} interferers at mean INR {-5, -2, 0} dB (fig2 preset)."""

from _common import parse_figure_args, print_curves, run_figure


def main():
    _, table = run_figure(parse_figure_args("fig2", __doc__))
    print_curves(table, "outage.exact")


if __name__ == "__main__":
    main()
