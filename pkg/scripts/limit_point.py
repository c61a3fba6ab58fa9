"""X_n / n for the constant-nu up chain on N^d, for growing n."""

import argparse
import sys

from posetchains.montecarlo import SimulationConfig, estimate_limit_point


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nu", default="0.2,0.3,0.5")
    ap.add_argument("--n", type=int, nargs="+", default=[100, 1000, 10_000, 100_000])
    ap.add_argument("--replicas", type=int, default=100)
    ap.add_argument("--seed", type=int, default=314159)
    args = ap.parse_args()

    nu = [float(t) for t in args.nu.split(",")]
    for n in args.n:
        est = estimate_limit_point(nu, n, SimulationConfig(seed=args.seed, replicas=args.replicas))
        mean = ", ".join(f"{m:.5f}" for m in est.mean)
        print(f"n={n:>7}  mean=({mean})  max|dev|={est.max_deviation:.2e}  >4se: {est.exceeds_4se}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
