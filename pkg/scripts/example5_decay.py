"""Hitting probability of (1,1) at level 2 for the N^2 down chain with
1/2 on interior edges and 1 on boundary edges, by starting level.

Prints the worst start and the uniform-start value next to the central
binomial closed form for the worst start.
"""

import argparse
import math
import sys

from posetchains.ndlattice import example5_decay


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-max", type=int, default=30)
    args = ap.parse_args()

    worst = example5_decay(args.n_max)
    flat = example5_decay(args.n_max, start="uniform")
    print(f"{'n':>4} {'max start':>14} {'C(n-2,k)/2^(n-2)':>18} {'uniform start':>14}")
    for n in worst:
        closed = math.comb(n - 2, (n - 2) // 2) / 2 ** (n - 2)
        print(f"{n:>4} {worst[n]:>14.10f} {closed:>18.10f} {flat[n]:>14.10f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
