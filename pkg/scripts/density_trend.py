#!/usr/bin/env python3
"""Estimate how often a random r-subset of F_3^n fails to contain a
nontrivial progression inside every alpha-fraction subset, sweeping the
size multiplier C in r = C sqrt(N).  The estimate is refutation-based
(witnessed failures only), so it lower-bounds the true failure probability."""

import argparse
import math

from fpnreg.randmodel import mc_density_failure
from fpnreg.vectorspace import SpaceDescriptor


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--outer", type=int, default=20)
    ap.add_argument("--inner", type=int, default=50)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--grid", type=str, default="2,10,30", help="comma-separated C values")
    args = ap.parse_args()

    space = SpaceDescriptor(args.p, args.n)
    print("C,r,failing_sets,failure_freq")
    for C in (float(x) for x in args.grid.split(",")):
        r = min(space.N, int(C * math.sqrt(space.N)))
        rep = mc_density_failure(space, r, args.alpha, args.outer, args.inner, args.seed)
        print(f"{C:g},{r},{rep.failing_sets},{rep.failure_freq:.6g}")


if __name__ == "__main__":
    main()
