"""Phase RMSE of separate and entangled readout over a pulse-width grid."""
import argparse
import csv
import math
import sys

from proptime.clock import ClockSpec
from proptime.estimator import compare_schemes, null_model_rmse
from proptime.qstate import SeededRng


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--phase", type=float, default=0.7, help="true E * delta_t")
    ap.add_argument("--n", type=int, default=1000, help="shots per repetition")
    ap.add_argument("--repetitions", type=int, default=200)
    ap.add_argument("--widths", type=float, nargs="+", default=[0.01, 0.1, 0.25, 0.5, 1, 10, 100],
                    help="pulse half-widths in clock periods")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)

    clock = ClockSpec.constant(1.0)
    rows = compare_schemes(args.phase, clock, [f * clock.period for f in args.widths], args.n,
                           SeededRng(args.seed), repetitions=args.repetitions)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["scheme", "width_periods", "visibility", "rmse", "cramer_rao", "null_rmse",
                "no_information"])
    for r in rows:
        w.writerow([r.scheme, f"{r.pulse_halfwidth / clock.period:g}", f"{r.visibility:.4g}",
                    f"{r.rmse:.5g}", f"{0.5 / math.sqrt(args.n):.5g}",
                    f"{null_model_rmse(args.phase):.5g}", int(r.no_information)])


if __name__ == "__main__":
    main()
