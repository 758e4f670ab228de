#!/usr/bin/env python3
"""Probe whether flattening geometric weights recovers the unit-weight bound.

For a ladder of ratios s -> 1 the script compares the finite-section
bound under geometric:s weights against the unit-weight bound for the
same mean. A persistent gap as s approaches 1 is the interesting
outcome; the numbers here are evidence for choosing follow-up runs, not
a verdict.

    python3 scripts/continuity_sweep.py --mean power:1/2
    python3 scripts/continuity_sweep.py --mean power:0 --ratios 0.5,0.9,0.99 --n 256
"""

import argparse
import csv
import math
import sys

from hardylab.families import parse_mean
from hardylab.hardy import copson_constant, finite_lower_bound
from hardylab.scalars import parse_number
from hardylab.search import OptimizerConfig
from hardylab.weights import make_sequence


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mean", default="power:1/2", help="mean descriptor")
    ap.add_argument("--ratios", default="1/2,3/4,9/10,99/100",
                    help="comma-separated ratios in (0,1)")
    ap.add_argument("--n", type=int, default=128, help="section size")
    ap.add_argument("--starts", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", help="also write rows to this path")
    args = ap.parse_args()

    mean = parse_mean(args.mean)
    cfg = OptimizerConfig(starts=args.starts, seed=args.seed)
    ratios = [parse_number(t) for t in args.ratios.split(",") if t.strip()]

    flat = finite_lower_bound(mean, make_sequence("ones"), args.n, cfg)
    rows = []
    for s in ratios:
        est = finite_lower_bound(mean, make_sequence(f"geometric:{s}"),
                                 args.n, cfg)
        rows.append((str(s), est.value, flat.value - est.value))

    print(f"# mean={mean.name} N={args.n} starts={args.starts}")
    print(f"{'s':>10}  {'geometric bound':>20}  {'gap to ones':>14}")
    for name, value, gap in rows:
        print(f"{name:>10}  {value:>20.15f}  {gap:>14.3e}")
    print(f"{'ones':>10}  {flat.value:>20.15f}")
    if mean.family == "power":
        cap = copson_constant(float(mean.params))
        if math.isfinite(cap):
            print(f"# closed-form cap at unit weights: {cap!r}")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["s", "value", "gap_to_ones"])
            for name, value, gap in rows:
                writer.writerow([name, repr(value), repr(gap)])
            writer.writerow(["ones", repr(flat.value), repr(0.0)])
    return 0


if __name__ == "__main__":
    sys.exit(main())
