#!/usr/bin/env python3
"""Track finite-section lower bounds as the section grows.

Runs the warm-started sweep over a doubling ladder of section sizes and
prints one row per size, next to the closed-form cap when the mean has
one. Useful for eyeballing how quickly the bounds saturate, and for
choosing an N that is large enough before burning CPU on a long sweep.

    python3 scripts/convergence_study.py --mean power:1/2 --weights dyadic
    python3 scripts/convergence_study.py --mean power:0 --weights ones --max-n 512
"""

import argparse
import math
import sys

from hardylab.families import parse_mean
from hardylab.hardy import copson_constant, finite_lower_bound_sweep
from hardylab.search import OptimizerConfig
from hardylab.weights import make_sequence


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mean", default="power:1/2", help="mean descriptor")
    ap.add_argument("--weights", default="dyadic", help="weight descriptor")
    ap.add_argument("--min-n", type=int, default=4)
    ap.add_argument("--max-n", type=int, default=128)
    ap.add_argument("--starts", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    mean = parse_mean(args.mean)
    lam = make_sequence(args.weights)
    sizes = []
    n = args.min_n
    while n <= args.max_n:
        sizes.append(n)
        n *= 2

    cap = None
    if mean.family == "power":
        cap = copson_constant(float(mean.params))

    cfg = OptimizerConfig(starts=args.starts, seed=args.seed)
    print(f"# mean={mean.name} weights={args.weights} starts={args.starts}")
    header = f"{'N':>8}  {'lower bound':>20}  {'gain':>12}"
    if cap is not None and math.isfinite(cap):
        header += f"  {'cap - bound':>14}"
    print(header)
    prev = None
    for est in finite_lower_bound_sweep(mean, lam, sizes, cfg):
        gain = "" if prev is None else f"{est.value - prev:.3e}"
        row = f"{est.N:>8}  {est.value:>20.15f}  {gain:>12}"
        if cap is not None and math.isfinite(cap):
            row += f"  {cap - est.value:>14.3e}"
        print(row)
        prev = est.value
    if cap is not None and math.isfinite(cap):
        print(f"# closed-form cap at unit weights: {cap!r}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
