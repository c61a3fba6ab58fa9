"""Mean rescaled boundary of stationary derow-row(mu_n) diagrams against exp(-x).

    python scripts/limit_shape.py --n 10000 --replicas 200 --schedule "n^-0.5"
"""

import argparse
import sys

import numpy as np

from posetchains.montecarlo import SimulationConfig, estimate_limit_shape, parse_schedule


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[100, 1000, 10_000])
    ap.add_argument("--schedule", default="n^-0.5")
    ap.add_argument("--replicas", type=int, default=200)
    ap.add_argument("--seed", type=int, default=20240101)
    ap.add_argument("--csv", help="write the curve for the largest n here")
    args = ap.parse_args()

    grid = np.linspace(0.0, 3.0, 301)
    schedule = parse_schedule(args.schedule)
    print(f"{'n':>8} {'mu_n':>10} {'sup':>8} {'L1':>8}")
    est = None
    for n in sorted(args.n):
        est = estimate_limit_shape(schedule, n, grid, SimulationConfig(seed=args.seed, replicas=args.replicas))
        print(f"{n:>8} {est.mu:>10.5f} {est.sup_distance:>8.4f} {est.l1_distance:>8.4f}")
    if args.csv and est is not None:
        with open(args.csv, "w") as fh:
            fh.write("x,mean_y,stderr,reference\n")
            for row in est.csv_rows():
                fh.write(",".join(f"{v:.6g}" for v in row) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
