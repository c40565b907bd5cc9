"""Command line entry point.

Subcommands map one-to-one onto the study drivers:

    nsmaxwell linear-decay   --config FILE [--out DIR] [--seed N] [--quiet]
    nsmaxwell nonlinear-run  --config FILE ...
    nsmaxwell bound-check    --config FILE ...
    nsmaxwell energy-monitor --config FILE ...
    nsmaxwell fit            --config FILE ...

Exit codes: 0 on success, 2 when any pass/fail table contains a failure,
1 on errors (bad config, blow-up, quadrature failure).
"""

from __future__ import annotations

import argparse
import sys

from .config import parse_config
from .studies import (
    run_bound_check,
    run_energy_monitor,
    run_fit,
    run_linear_study,
    run_nonlinear_study,
)

_RUNNERS = {
    "linear-decay": lambda cfg, out, seed, quiet: run_linear_study(cfg, out, quiet),
    "nonlinear-run": lambda cfg, out, seed, quiet: run_nonlinear_study(cfg, out, seed, quiet),
    "bound-check": lambda cfg, out, seed, quiet: run_bound_check(cfg, out, quiet),
    "energy-monitor": lambda cfg, out, seed, quiet: run_energy_monitor(cfg, out, seed, quiet),
    "fit": lambda cfg, out, seed, quiet: run_fit(cfg, out, quiet),
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="nsmaxwell",
        description="Decay studies and box runs for the charged-fluid/Maxwell system",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--out", default="out", help="output directory (default: ./out)")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for random probe/initial states")
        p.add_argument("--quiet", action="store_true", help="suppress progress lines")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = parse_config(args.config)
        if config.mode != args.command:
            print(f"error: config sets mode={config.mode!r} but subcommand is "
                  f"{args.command!r}", file=sys.stderr)
            return 1
        result = _RUNNERS[args.command](config, args.out, args.seed, args.quiet)
        return 0 if result.ok else 2
    except BrokenPipeError:
        raise
    except Exception as exc:  # noqa: BLE001 - boundary of the process
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
