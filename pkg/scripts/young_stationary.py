"""Exact UD stationary law on Young's lattice levels i, i+1 versus the closed form."""

import argparse
import sys

from posetchains.engine import stationary_ud
from posetchains.young import stationary_ud_formula, young_rules


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, nargs="+", default=[0.1, 0.3, 0.5, 0.7])
    ap.add_argument("--max-level", type=int, default=10)
    args = ap.parse_args()

    for mu in args.mu:
        Y, U, D = young_rules(args.max_level + 1, mu)
        for i in range(1, args.max_level + 1):
            worst = 0.0
            for dist in stationary_ud(U, D, i):
                for lam, w in dist.by_key().items():
                    worst = max(worst, abs(w / 2 - stationary_ud_formula(lam, mu)))
            print(f"mu={mu:<4} i={i:<3} states={Y.level_size(i) + Y.level_size(i + 1):<5} max|err|={worst:.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
