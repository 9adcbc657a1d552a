# coding: utf-8
"""
Command line front end: ``specscan <mode> [--config PATH] [--seed N] ...``.
"""
import argparse
import logging
from logging import getLogger

from . import __version__
from .config import ConfigError, ExperimentConfig, MODES, load_config
from .harness import InfeasibleGeometryError, run

log = getLogger(__name__)

MODE_HELP = {
    "synth": "write noisy measurements of generated spectra",
    "music": "reconstruct with plain MUSIC",
    "scan": "reconstruct with SCAN-MUSIC",
    "scanc": "reconstruct clustered spectra with SCAN-MUSIC(C)",
    "detect": "reconstruct the centers of clustered spectra",
    "bench": "run a benchmark series (see bench.kind)",
    "check": "evaluate every error-bound check and print the table",
}
INVALID = "Invalid configuration: %s"
INFEASIBLE = "Infeasible geometry: %s"


def build_parser():
    """
    Argument parser with one subcommand per mode.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--seed", type=int, help="overrides run.seed")
    common.add_argument("--out", help="output directory, overrides run.output")
    common.add_argument(
        "--reps", type=int, help="overrides run.repetitions"
    )
    common.add_argument(
        "--archive", action="store_true",
        help="also write the trials to trials.h5",
    )
    common.add_argument(
        "--quiet", action="store_true", help="only log warnings and errors"
    )
    parser = argparse.ArgumentParser(
        prog="specscan",
        description="Line spectral estimation with SCAN-MUSIC.",
    )
    parser.add_argument(
        "--version", action="version", version="%(prog)s " + __version__
    )
    subparsers = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        subparsers.add_parser(mode, parents=[common], help=MODE_HELP[mode])
    return parser


def config_from_args(args):
    """
    Configuration file (or defaults) with the command line overrides applied.
    """
    config = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {"run__mode": args.mode}
    if args.seed is not None:
        overrides["run__seed"] = args.seed
    if args.out is not None:
        overrides["run__output"] = args.out
    if args.reps is not None:
        overrides["run__repetitions"] = args.reps
    if args.archive:
        overrides["run__archive"] = True
    return config.replace(**overrides)


def main(argv=None):
    """
    Entry point of the ``specscan`` command; returns the exit status.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = config_from_args(args)
        return run(config)
    except (ConfigError, OSError) as exc:
        log.error(INVALID, exc)
        return 2
    except InfeasibleGeometryError as exc:
        log.error(INFEASIBLE, exc)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
