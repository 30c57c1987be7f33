"""Command-line front end: ``qrfbell --scenario FILE --out DIR``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .errors import ConfigurationError, ConsistencyError, ConvergenceError, DomainError, ParseError
from .scenario import emit_report, load_scenario, parse_sweep, run_scenario, run_sweep

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CONVERGENCE = 3
EXIT_CONSISTENCY = 4


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qrfbell",
        description="Evaluate CHSH-Bell violations in A's rest frame and in the laboratory frame.",
    )
    parser.add_argument("--scenario", required=True, help="scenario file (key = value lines)")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--sweep", metavar="KEY=START:STOP:STEPS", help="sweep one numeric scenario key")
    parser.add_argument("--oracle", action="store_true", help="take Wigner angles from the 4x4 matrix oracle")
    parser.add_argument("--grid-check", action="store_true", help="repeat the run with twice the grid points")
    parser.add_argument("--workers", type=int, default=None, help="threads for sweep points")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
        scenario = replace(
            scenario,
            oracle=scenario.oracle or args.oracle,
            grid_check=scenario.grid_check or args.grid_check,
        )
        sweep = parse_sweep(args.sweep) if args.sweep else None
        report = run_scenario(scenario)
        if sweep:
            key, values = sweep
            report.sweep_key = key
            report.sweep = run_sweep(scenario, key, values, workers=args.workers)
        for path in emit_report(report, args.out):
            print(path)
    except (ParseError, ConfigurationError, DomainError) as exc:
        print(f"qrfbell: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConvergenceError as exc:
        print(f"qrfbell: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ConsistencyError as exc:
        print(f"qrfbell: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except OSError as exc:
        print(f"qrfbell: {exc}", file=sys.stderr)
        return 1
    if report.converged is False:
        print("qrfbell: warning: grid check did not converge", file=sys.stderr)
    return EXIT_OK
