#!/usr/bin/env python3
"""Sweep Monte Carlo sample counts for one rotational experiment and
write a CSV of (N, lhs, se, |lhs - rhs|) to study the 1/sqrt(N) decay.

Example:
    python scripts/convergence_sweep.py --r 1 --s 1 --out sweep.csv
"""

import argparse
import csv
import sys

import numpy as np

from crofton.bodies import Ball
from crofton.montecarlo import EstimatorConfig, TensorFunctional, \
    estimate_rot_lhs
from crofton.rhs import rot_rhs_surface


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--r", type=int, default=1)
    parser.add_argument("--s", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="-")
    args = parser.parse_args()

    body = Ball(np.array([0.3, 0.0, 0.1]), 1.0)
    target = rot_rhs_surface(body, 2, args.r, args.s, 64).coeffs
    rows = []
    for n in (1000, 2000, 4000, 8000, 16000, 32000, 64000):
        cfg = EstimatorConfig(n_samples=n, seed=args.seed, section_order=8)
        est = estimate_rot_lhs(body, 2, TensorFunctional(1, args.r, args.s),
                               cfg)
        err = float(np.max(np.abs(est.value - target)))
        rows.append({"n": n, "lhs_first": est.value[0],
                     "se_max": float(np.max(est.se)), "max_err": err})
        print(f"N={n:>6}  se_max={rows[-1]['se_max']:.3e}  err={err:.3e}")
    stream = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    writer = csv.DictWriter(stream, fieldnames=["n", "lhs_first", "se_max",
                                                "max_err"])
    writer.writeheader()
    writer.writerows(rows)
    if stream is not sys.stdout:
        stream.close()


if __name__ == "__main__":
    main()
