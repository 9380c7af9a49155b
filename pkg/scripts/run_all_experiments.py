#!/usr/bin/env python3
"""Run every experiment at its default scale and write artifacts under a
common output root (one subdirectory per experiment)."""

import argparse
import sys
import time

from qhandshake.cli import execute
from qhandshake.config import EXPERIMENTS, RunConfig


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", default="out")
    args = parser.parse_args()

    failures = 0
    for name in EXPERIMENTS:
        cfg = RunConfig(experiment=name, seed=args.seed, outdir=f"{args.out}/{name}")
        t0 = time.perf_counter()
        code = execute(cfg, check=True)
        elapsed = time.perf_counter() - t0
        status = "ok" if code == 0 else "FAILED"
        print(f"{name:10s} {status:6s} {elapsed:6.1f}s -> {cfg.outdir}/")
        failures += code != 0
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
