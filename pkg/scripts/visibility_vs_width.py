"""Separate-clock fringe visibility against pulse width, next to the quadrature oracle.

    python scripts/visibility_vs_width.py --gap 1.0 --area 0.1
"""
import argparse
import csv
import math
import sys

import numpy as np

from proptime.clock import ClockSpec
from proptime.vonneumann import MeasurementConfig, fringe_visibility, visibility_oracle


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gap", type=float, default=1.0)
    ap.add_argument("--area", type=float, default=None, help="pulse area (default pi/4)")
    ap.add_argument("--points", type=int, default=13)
    ap.add_argument("--max-periods", type=float, default=1.0)
    args = ap.parse_args(argv)

    clock = ClockSpec.constant(args.gap)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["width_periods", "visibility", "oracle", "gaussian_form"])
    for frac in np.linspace(args.max_periods / args.points, args.max_periods, args.points):
        dt = float(frac) * clock.period
        cfg = MeasurementConfig.separate(dt, pulse_area=args.area)
        w.writerow([f"{frac:.4f}", f"{fringe_visibility(clock, cfg):.6g}",
                    f"{visibility_oracle(args.gap, cfg):.6g}",
                    f"{math.exp(-2 * (args.gap * dt) ** 2):.6g}"])


if __name__ == "__main__":
    main()
