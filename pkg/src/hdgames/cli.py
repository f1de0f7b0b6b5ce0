"""Command-line entry point.

    hdgames simulate --config FILE [--seed N] [--trials N] [--out DIR]
    hdgames verify [--scope core|coupling|equilibrium|all] [--budget N] [--out FILE]
    hdgames experiment cti-fig1|sis-fig2 [overrides]

Exit codes: 0 all checks pass, 1 property failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .config import default_config, parse_config
from .errors import ConfigError
from .runner import run_experiment
from .verify import SCOPES, run_verifications


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdgames",
        description="Simulate and verify history-dependent binary-action games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run an experiment from a config file")
    sim.add_argument("--config", required=True, help="JSON configuration file")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--trials", type=int)
    sim.add_argument("--out", help="output directory")

    ver = sub.add_parser("verify", help="run the machine-verification suites")
    ver.add_argument("--scope", choices=SCOPES, default="all")
    ver.add_argument("--budget", type=int, default=10**6,
                     help="enumeration budget for exact sweeps")
    ver.add_argument("--out", help="write the JSON report here as well")

    exp = sub.add_parser("experiment", help="run a named experiment with defaults")
    exp.add_argument("name", choices=("cti-fig1", "sis-fig2"))
    exp.add_argument("--seed", type=int, default=1)
    exp.add_argument("--trials", type=int)
    exp.add_argument("--T", type=int, dest="horizon")
    exp.add_argument("--tau", type=float)
    exp.add_argument("--parallelism", type=int)
    exp.add_argument("--out", default="results")
    return parser


def _cmd_simulate(args) -> int:
    overrides = {"seed": args.seed, "trials": args.trials, "out": args.out}
    config = parse_config(args.config, overrides)
    summary = run_experiment(config)
    checks = summary["dominance"]
    print(f"wrote results to {config.out or args.out}")
    if not (checks["holds"] and checks["terminal_all_ones_holds"]):
        print("dominance check failed; see summary.json", file=sys.stderr)
        return 1
    return 0


def _cmd_verify(args) -> int:
    report = run_verifications(scope=args.scope, budget=args.budget)
    payload = report.to_dict()
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return 0 if report.passed else 1


def _cmd_experiment(args) -> int:
    overrides = {
        "seed": args.seed,
        "trials": args.trials,
        "T": args.horizon,
        "tau": args.tau,
        "parallelism": args.parallelism,
        "out": args.out,
    }
    config = default_config(args.name, **overrides)
    summary = run_experiment(config)
    checks = summary["dominance"]
    print(f"wrote results to {args.out}")
    if not (checks["holds"] and checks["terminal_all_ones_holds"]):
        print("dominance check failed; see summary.json", file=sys.stderr)
        return 1
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_experiment(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
