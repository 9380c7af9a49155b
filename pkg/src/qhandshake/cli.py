"""Command-line front door: run named experiments deterministically from a
seed and write CSV/JSON artifacts.

Exit codes: 0 success, 1 check-mode threshold failure, 2 generic config
error (including an unknown experiment name), 3 missing config file,
4 unknown config key, 5 out-of-range value.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import EXPERIMENTS, ConfigError, RunConfig, parse_config
from .experiments import ExperimentResult, run_experiment

__all__ = ["main", "execute", "write_artifacts"]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def write_artifacts(result: ExperimentResult, cfg: RunConfig, outdir: str) -> tuple[Path, Path]:
    """Write result.csv and summary.json (self-describing: resolved config,
    seed, and version embedded). Byte-stable for a fixed config and seed."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "result.csv"
    lines = [",".join(result.csv_header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in result.csv_rows)
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    payload = {
        "artifact_version": __version__,
        "experiment": result.name,
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "summary": result.summary,
        "passed": result.passed,
    }
    json_path = out / "summary.json"
    json_path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return csv_path, json_path


def execute(cfg: RunConfig, check: bool = False) -> int:
    """Validate, run, write artifacts into cfg.outdir; return the exit code."""
    cfg.validate()
    result = run_experiment(cfg)
    write_artifacts(result, cfg, cfg.outdir)
    if check and not result.passed:
        return 1
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qhandshake",
        description="Deterministic transactional-handshake simulator and experiments",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
        p.add_argument("--trials", type=int, help="trial/run count override")
        p.add_argument("--out", help="output directory (default: out)")
        p.add_argument(
            "--check",
            action="store_true",
            help="exit 1 when the experiment misses its statistical thresholds",
        )

    run_p = sub.add_parser("run", help="run the experiment named in a config file")
    run_p.add_argument("config_path", help="flat key = value config file")
    add_common(run_p)

    for name in EXPERIMENTS:
        add_common(sub.add_parser(name, help=f"run the {name} experiment with defaults"))

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = parse_config(args.config_path)
        else:
            cfg = RunConfig(experiment=args.command)
        provided = set(cfg.provided)
        if args.seed is not None:
            cfg.seed = args.seed
            provided.add("seed")
        if args.trials is not None:
            cfg.trials = args.trials
            provided.add("trials")
        if args.out is not None:
            cfg.outdir = args.out
            provided.add("outdir")
        cfg.provided = frozenset(provided)
        return execute(cfg, check=args.check)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
