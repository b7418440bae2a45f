# qklab/cli.py

"""
Command-line entry point.

    qklab bounds --config gaussian
    qklab corruption --config my.cfg --set folds=4 --out results/

Exit status: 0 success, 2 configuration or input error (infeasible C' included),
3 solver did not converge, 4 a run-time invariant failed.
"""

import argparse
import logging
import sys

from .config import load_config, parse_override
from .exceptions import (ConvergenceError, InfeasibleCError, InvariantViolation,
                         QklabError, ValidationError)
from .experiments import STUDIES, ExperimentRunner

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_INVARIANT = 4


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qklab",
        description="Noisy quantum-kernel SVM experiments (IQP encoding, depolarising noise).")
    sub = parser.add_subparsers(dest="study", metavar="{" + ",".join(STUDIES) + "}")
    sub.required = True
    helps = {
        "corruption": "accuracy and margin distribution under training-label corruption",
        "noise-compare": "global vs local depolarising noise at matched survival probability",
        "bounds": "empirical noisy margin against the margin bounds",
        "select": "C0 selection and feasible C' range",
        "kernel-export": "write the prepared dataset and kernel matrix",
    }
    for study in STUDIES:
        p = sub.add_parser(study, help=helps[study])
        p.add_argument("--config", "-c", required=True,
                       help="config file or preset name (gaussian, toy, heart, cancer, wine, htru2)")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config value (repeatable)")
        p.add_argument("--seed", type=int, help="random seed")
        p.add_argument("--out", help="output directory (overrides QKLAB_OUT)")
        p.add_argument("--parallel", dest="parallel", action="store_true", default=None,
                       help="run independent units in a process pool")
        p.add_argument("--no-parallel", dest="parallel", action="store_false")
        p.add_argument("--n-processes", type=int, help="pool size (default: all cores)")
        verbosity = p.add_mutually_exclusive_group()
        verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
        verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    return parser


def _overrides(args):
    overrides = dict(parse_override(text) for text in args.overrides)
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.parallel is not None:
        overrides["parallel"] = str(args.parallel)
    if args.n_processes is not None:
        overrides["n_processes"] = str(args.n_processes)
    return overrides


def cli_main(argv=None):
    """Parse ``argv``, run the study and return the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_CONFIG

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        config = load_config(args.config, _overrides(args))
        record = ExperimentRunner(config).run(args.study)
    except InfeasibleCError as e:
        if e.feasible_range is not None:
            low, high = e.feasible_range
            print(f"error: {e}\nfeasible C' range: [{low:.6g}, {high:.6g})", file=sys.stderr)
        else:
            print(f"error: {e}\nno feasible C' range (C'_max at p = 0: {e.c_prime_max:.6g})",
                  file=sys.stderr)
        return EXIT_CONFIG
    except (ValidationError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except InvariantViolation as e:
        print(f"error: invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except QklabError as e:
        # degenerate margins or bound parameters: a property of the input data
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    for name, path in record.outputs.items():
        logger.info("%s: %s", name, path)
    return EXIT_OK


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
