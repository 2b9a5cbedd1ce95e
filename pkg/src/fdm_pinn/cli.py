"""Command line entry point: ``fdm-pinn {run,summarize,gen-truth}``."""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import FdmPinnError
from .experiment import ground_truth, run_experiment, summarize
from .fieldio import write_field_csv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdm-pinn", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run every cell of an experiment config")
    run.add_argument("config")
    run.add_argument("--smoke", action="store_true",
                     help="cap training at 10 iterations per cell")

    summ = sub.add_parser("summarize", help="aggregate results.csv over seeds")
    summ.add_argument("results")
    summ.add_argument("-o", "--output", default=None)

    gen = sub.add_parser("gen-truth", help="write a ground-truth field as CSV")
    gen.add_argument("problem", choices=["laplace", "burgers"])
    gen.add_argument("out")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            return run_experiment(args.config, smoke=args.smoke)
        if args.command == "summarize":
            print(summarize(args.results, args.output))
            return 0
        write_field_csv(ground_truth(args.problem), args.out)
        return 0
    except (FdmPinnError, OSError) as exc:
        print(f"fdm-pinn: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
