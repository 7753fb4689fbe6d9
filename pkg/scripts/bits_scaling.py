"""Empirical phase spread against the number of clock pairs N = 2^(2n).

Each extra bit of phase needs four times as many pairs; the std column
should halve from row to row and track the Cramer-Rao column.
"""
import argparse
import csv
import math
import sys

import numpy as np

from proptime.clock import ClockSpec, pair_evolve
from proptime.estimator import entangled_record
from proptime.qstate import SINGLET, SeededRng
from proptime.vonneumann import MeasurementConfig, entangled_measurement


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--phase", type=float, default=0.7)
    ap.add_argument("--bits", type=int, nargs=2, default=(2, 8), metavar=("LO", "HI"))
    ap.add_argument("--repetitions", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=2001)
    args = ap.parse_args(argv)

    clock = ClockSpec.constant(1.0)
    pair = pair_evolve(SINGLET, clock, args.phase, clock, 0.0)
    outcome = entangled_measurement(pair, clock, clock, MeasurementConfig.entangled(0.01 * clock.period))
    base = SeededRng(args.seed)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["bits", "n_pairs", "mean", "std", "cramer_rao"])
    for bits in range(args.bits[0], args.bits[1] + 1):
        n = 4 ** bits
        est = np.array([entangled_record(outcome, n, base.split(bits * 100_000 + r)).phase_estimate
                        for r in range(args.repetitions)])
        w.writerow([bits, n, f"{est.mean():.6f}", f"{est.std(ddof=1):.6g}",
                    f"{0.5 / math.sqrt(n):.6g}"])


if __name__ == "__main__":
    main()
