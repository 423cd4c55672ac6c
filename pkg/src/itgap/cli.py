"""Command-line harness: run, reproduce-table, reproduce-figure, selftest.

Exit codes: 0 success, 1 validation error, 2 numerical failure,
3 support-precondition warning (suppressible with --allow-precondition-failure).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import BENCHMARKS, ConfigError, load_config
from .estimators import PreAsymptoticError
from .runner import cmd_run, reproduce_figure, reproduce_table

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_PRECONDITION = 3


def _apply_overrides(cfg: dict, args) -> dict:
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.backend is not None:
        cfg["backend"] = args.backend
    return cfg


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cfg = _apply_overrides(cfg, args)
    try:
        result = cmd_run(cfg, Path(args.out))
    except (PreAsymptoticError, ValueError, ZeroDivisionError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    out = Path(args.out)
    print(f"wrote {out / cfg['output']['trajectory_csv']}")
    print(f"wrote {out / cfg['output']['estimates_json']}")
    if not result["support"]["all_ok"]:
        print("warning: support-precondition check failed "
              "(see support_check in estimates JSON)", file=sys.stderr)
        if not args.allow_precondition_failure:
            return EXIT_PRECONDITION
    return EXIT_OK


def _cmd_reproduce_table(args) -> int:
    try:
        panels = reproduce_table(Path(args.out), seed=args.seed, backend=args.backend)
    except (PreAsymptoticError, ValueError, ZeroDivisionError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for name, panel in panels.items():
        print(f"\n{name} (M=1)")
        print(f"{'quantity':>10s} {'exact':>12s} {'method':>12s} {'rel. error':>12s}")
        for qty, label in (("energy_sum", "E0+E1"), ("second_gap", "E2-E1")):
            row = panel[qty]
            print(f"{label:>10s} {row['exact']:12.6g} {row['method']:12.6g} "
                  f"{row['relative_error']:12.3g}")
    print(f"\nwrote {Path(args.out) / 'table.csv'} and table.json")
    return EXIT_OK


def _cmd_reproduce_figure(args) -> int:
    try:
        slopes = reproduce_figure(
            Path(args.out), seed=args.seed, backend=args.backend, plot=not args.no_plot
        )
    except (PreAsymptoticError, ValueError, ZeroDivisionError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for name, info in slopes.items():
        oracle = info["oracle_second_gap"]
        for key in ("m1", "m2"):
            if key in info:
                rate = info[key]["epsilon_decay_rate"]
                print(f"{name} {key}: epsilon decay rate {rate:.4f} "
                      f"(oracle E2-E1 = {oracle:.4f}, R^2 = {info[key]['r_squared']:.5f})")
    print(f"wrote figure CSVs and figure_slopes.json to {args.out}")
    if not args.no_plot:
        print(f"wrote {Path(args.out) / 'relative_error.png'}")
    return EXIT_OK


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    kwargs = {"verbose": True}
    if args.seed is not None:
        kwargs["seed"] = args.seed
    report = run_selftest(**kwargs)
    return EXIT_OK if report["all_passed"] else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="itgap",
        description="Spectral-gap extraction from imaginary-time trajectories",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--seed", type=int, default=None, help="override config seed")
    common.add_argument("--backend", choices=["exact", "stepped"], default=None,
                        help="override propagation backend")

    p_run = sub.add_parser("run", parents=[common], help="run one experiment config")
    p_run.add_argument("--config", required=True, help="path to JSON config")
    p_run.add_argument("--allow-precondition-failure", action="store_true",
                       help="exit 0 even if the support check fails")
    p_run.set_defaults(func=_cmd_run)

    p_tab = sub.add_parser("reproduce-table", parents=[common],
                           help="benchmark table of E0+E1 and E2-E1 estimates")
    p_tab.set_defaults(func=_cmd_reproduce_table)

    p_fig = sub.add_parser("reproduce-figure", parents=[common],
                           help="relative-error curves for both benchmark models")
    p_fig.add_argument("--no-plot", action="store_true",
                       help="skip the rendered PNG, write CSV/JSON only")
    p_fig.set_defaults(func=_cmd_reproduce_figure)

    p_self = sub.add_parser("selftest", parents=[common],
                            help="run built-in consistency checks")
    p_self.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
