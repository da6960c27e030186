"""Command-line entry points: run experiments, plot CSV results.

Exit codes follow a fixed contract so CI can gate on semantics:
0 success, 2 configuration problem, 3 numerical guard tripped (a grid or
band too small for a certified answer), 4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import jsonschema

from .errors import ConfigError, InvariantError, ResolutionError
from .experiments import EXPERIMENT_NAMES, load_config, run
from .svgplot import plot_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_INVARIANT = 4

WORKERS_ENV = "TORUSLAB_WORKERS"


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toruslab",
        description="Run rearranged-Fourier-series experiments and plot their results.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help=f"run one experiment ({', '.join(EXPERIMENT_NAMES)})")
    runp.add_argument("--config", required=True, help="path to an experiment config JSON")
    runp.add_argument("--seed", type=int, default=None, help="override the config seed")
    runp.add_argument(
        "--workers",
        type=int,
        default=None,
        help=f"override worker count (default from ${WORKERS_ENV} or config)",
    )
    runp.add_argument("--out", default=None, help="override the output directory")

    plotp = sub.add_parser("plot", help="render a CSV column pair as a deterministic SVG")
    plotp.add_argument("--csv", required=True)
    plotp.add_argument("--x", required=True, help="x column name")
    plotp.add_argument("--y", required=True, help="y column name")
    plotp.add_argument("--out", required=True, help="output SVG path")
    plotp.add_argument("--kind", choices=["line", "scatter"], default="line")
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.workers is not None:
        updates["workers"] = args.workers
    elif WORKERS_ENV in os.environ:
        updates["workers"] = _default_workers()
    if args.out is not None:
        updates["output_dir"] = args.out
    if updates:
        from dataclasses import replace

        config = replace(config, **updates)
    manifest = run(config)
    json.dump(manifest.to_json_dict(), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_plot(args) -> int:
    if not os.path.exists(args.csv):
        raise ConfigError(f"CSV not found: {args.csv}")
    plot_csv(args.csv, args.x, args.y, args.out, kind=args.kind)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_plot(args)
    except (ConfigError, jsonschema.ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResolutionError as exc:
        print(
            f"numerical guard: {exc}\n"
            "hint: enlarge the grid (M), reduce the band, or widen the boxes",
            file=sys.stderr,
        )
        return EXIT_NUMERIC
    except InvariantError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
