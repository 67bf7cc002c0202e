#!/usr/bin/env python3
"""
Spinframe CLI

Command-line front end for the spin-geometry checks:
1. inspect - extract a scene and report the ranges of H, f, |T| and K
2. check - compatibility residuals and, with a spinor block, the spinor suite
3. reconstruct - rebuild the immersion of abstract data and report its defects
4. curvature-table - closed-form against numeric ambient curvature

The JSON report goes to stdout (or --out); logs go to stderr.
Exit codes: 0 all checks pass, 1 a check failed, 2 input error.
"""

import argparse
import logging
import sys
from typing import List, Optional

from spinframe import __version__
from spinframe.cli.commands import (CommandContext, cmd_check, cmd_curvature_table, cmd_inspect,
                                    cmd_reconstruct)
from spinframe.cli.report import CheckResult, Report
from spinframe.cli.scene import parse_grid, parse_parameters
from spinframe.exceptions import SpinframeError
from spinframe.utils.check_observer import CheckObserverManager, LoggingCheckObserver
from spinframe.utils.config_utils import load_spinframe_config

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT_ERROR = 2


def setup_logging(verbose: bool = False) -> None:
    """Set up logging configuration; logs go to stderr."""
    log_level = logging.DEBUG if verbose else logging.WARNING
    logging.basicConfig(
        level=log_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )


def parse_tolerances(pairs: Optional[List[str]]) -> dict:
    """Parse --tol name=value options."""
    result = {}
    for pair in pairs or ():
        name, sep, value = pair.partition("=")
        if not sep or not name.strip():
            raise ValueError(f"--tol expects name=value, got {pair!r}")
        try:
            result[name.strip()] = float(value)
        except ValueError:
            raise ValueError(f"Tolerance {name.strip()} is not a number: {value!r}")
    return result


def _add_common(parser: argparse.ArgumentParser) -> None:
    tuning = parser.add_argument_group("Tolerances and Configuration")
    tuning.add_argument("--tol", action="append", metavar="NAME=VALUE",
                        help="Override a tolerance (repeatable)")
    tuning.add_argument("--config", metavar="PATH",
                        help="Configuration YAML file (default: search standard locations)")

    output = parser.add_argument_group("Output")
    output.add_argument("--out", metavar="PATH", help="Write the JSON report to PATH instead of stdout")
    output.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")


def _add_scene_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("file", help="Scene or abstract-data JSON file")
    scene = parser.add_argument_group("Scene Options")
    scene.add_argument("--grid", metavar="N[xM]", help="Override the grid size")
    scene.add_argument("--param", action="append", metavar="NAME=VALUE",
                       help="Set a $name parameter of the expressions (repeatable)")
    scene.add_argument("--emit-grids", action="store_true",
                       help="Include per-point residual grids in the report")


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with its subcommands."""
    parser = argparse.ArgumentParser(
        prog="spinframe",
        description="""
Spin geometry of surfaces in the homogeneous 3-manifolds E(kappa, tau) and
M^2(kappa) x R: extraction, compatibility residuals, generalized Killing
spinors and immersion reconstruction.
""",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Ranges of H, f, |T| on a scene:
  spinframe inspect fixtures/nil3_vertical_plane.json

  # Full residual suite with a finer grid and a looser Killing tolerance:
  spinframe check fixtures/slice_s2xr.json --grid 96 --tol killing=2e-5

  # Rebuild an immersion and write the mesh:
  spinframe reconstruct fixtures/abstract_slice.json --mesh-out mesh.csv

  # Ambient curvature cross-check for the Berger sphere:
  spinframe curvature-table --kappa 4 --tau 1 --samples 50
""",
    )
    parser.add_argument("--version", action="version", version=f"spinframe {__version__}")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    inspect = commands.add_parser("inspect", help="Extract a scene and report invariant ranges")
    _add_scene_options(inspect)
    _add_common(inspect)

    check = commands.add_parser("check", help="Run the compatibility and spinor residual suites")
    _add_scene_options(check)
    _add_common(check)

    reconstruct = commands.add_parser("reconstruct", help="Rebuild an immersion from abstract data")
    _add_scene_options(reconstruct)
    mesh = reconstruct.add_argument_group("Mesh Output")
    mesh.add_argument("--mesh-out", metavar="PATH", help="Write u, v, x, y, z rows as CSV")
    mesh.add_argument("--frames-out", metavar="PATH", help="Write the frame grid as CSV")
    _add_common(reconstruct)

    table = commands.add_parser("curvature-table",
                                help="Compare closed-form and numeric ambient curvature")
    model = table.add_argument_group("Model Space")
    model.add_argument("--kappa", type=float, required=True, help="Base curvature")
    model.add_argument("--tau", type=float, required=True, help="Bundle curvature")
    sampling = table.add_argument_group("Sampling")
    sampling.add_argument("--samples", type=int, default=20, help="Number of random points (default: 20)")
    sampling.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    _add_common(table)
    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    return build_parser().parse_args(argv)


def _target(args: argparse.Namespace) -> str:
    """Report target of a command: its input file or the model parameters."""
    if args.command == "curvature-table":
        return f"kappa={args.kappa:g} tau={args.tau:g}"
    return args.file


def run(args: argparse.Namespace) -> int:
    """
    Run a parsed command and write its report.

    Returns:
        Exit code
    """
    observers = CheckObserverManager()
    observers.add_observer(LoggingCheckObserver(args.verbose))
    try:
        ctx = CommandContext(
            config=load_spinframe_config(args.config),
            tolerance_overrides=parse_tolerances(args.tol),
            parameters=parse_parameters(getattr(args, "param", None)),
            grid=parse_grid(getattr(args, "grid", None)),
            emit_grids=getattr(args, "emit_grids", False),
            observers=observers,
        )
        if args.command == "inspect":
            report = cmd_inspect(args.file, ctx)
        elif args.command == "check":
            report = cmd_check(args.file, ctx)
        elif args.command == "reconstruct":
            report = cmd_reconstruct(args.file, ctx, args.mesh_out, args.frames_out)
        else:
            if args.samples < 1:
                raise ValueError(f"--samples must be positive, got {args.samples}")
            report = cmd_curvature_table(args.kappa, args.tau, ctx, args.samples, args.seed)
    except SpinframeError as e:
        observers.run_failed(args.command, e.message)
        logger.error(f"{args.command} failed: {e.message}")
        if e.input_error:
            return EXIT_INPUT_ERROR
        report = Report(args.command, _target(args), checks=[CheckResult.from_error(e.code, e)])
    except ValueError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_INPUT_ERROR

    try:
        report.write(args.out)
    except OSError as e:
        logger.error(f"Cannot write report to {args.out}: {e}")
        return EXIT_INPUT_ERROR
    if not report.passed:
        logger.warning(f"Failed checks: {', '.join(report.failed_checks())}")
        return EXIT_FAIL
    return EXIT_PASS


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the spinframe CLI."""
    args = parse_args(argv)
    setup_logging(args.verbose)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
