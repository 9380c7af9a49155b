#!/usr/bin/env python3
"""Print the measurement-frequency ladder for the freezing experiment:
empirical survival against the closed form for a doubling sequence of N."""

import argparse
import math

from qhandshake.core import RandomSource, derive_seed
from qhandshake.zeno import expected_survival, zeno_run


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--trials", type=int, default=50_000)
    parser.add_argument("--theta", type=float, default=math.pi / 2.0)
    parser.add_argument("--max-n", type=int, default=1024)
    args = parser.parse_args()

    print(f"theta_total = {args.theta:.6f}, trials = {args.trials}")
    print(f"{'N':>6s} {'expected':>10s} {'empirical':>10s} {'3sigma':>9s}")
    n = 1
    idx = 0
    while n <= args.max_n:
        emp = zeno_run(args.theta, n, args.trials, RandomSource(derive_seed(args.seed, idx)))
        exp = expected_survival(args.theta, n)
        sigma3 = 3.0 * math.sqrt(exp * (1.0 - exp) / args.trials)
        print(f"{n:6d} {exp:10.6f} {emp:10.6f} {sigma3:9.6f}")
        n *= 2
        idx += 1


if __name__ == "__main__":
    main()
