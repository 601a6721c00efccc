#  Copyright (c) 2025, Moyal-Spin  All rights reserved.
#
#  Use of this source code is governed by a MIT license that can be
#  found in the LICENSE.txt file or at https://opensource.org/license/mit

"""Command-line entry point ``moyal-spin``.

Exit codes: 0 success, 1 usage or input error, 2 numerical validation failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..angular import coefficient_rows, twice
from ..config import ENABLE_DEBUG, RunConfig
from ..evolve import compare_with_oracle
from ..exceptions import MoyalSpinError
from ..quad import validate_stratonovich
from ..spin_ops import SpinOperator, decompose
from ..star import star_result
from ..wigner import SphereAngles, WignerCoeffs, evaluate, wigner_transform
from .export import CsvTableExporter, JsonExporter, export, render_json
from .expressions import parse_operator
from .props import props_decompose, sample_surface
from .scenarios import BUILTIN_SCENARIOS, evolve_scenario, load_scenario, run_scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2


class UsageError(Exception):
    pass


class CliArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"Error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def setup_logging(verbose: bool = False):
    level = logging.DEBUG if verbose or ENABLE_DEBUG else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _parameters(pairs: Optional[Sequence[str]]) -> Dict[str, float]:
    parameters = {}
    for pair in pairs or []:
        name, sep, value = pair.partition("=")
        if not sep:
            raise UsageError(f"parameter {pair!r} is not of the form name=value")
        try:
            parameters[name.strip()] = float(value)
        except ValueError as e:
            raise UsageError(f"parameter {name!r} has non-numeric value {value!r}") from e
    return parameters


def _operator(source: str, args) -> SpinOperator:
    """An operator from a JSON file or an expression."""
    if source.endswith(".json") and Path(source).exists():
        return SpinOperator.load(source)
    return parse_operator(source, args.spins, Fraction(twice(args.J), 2), _parameters(args.param))


def _coeffs(path: str) -> WignerCoeffs:
    try:
        with open(path, "r") as f:
            return WignerCoeffs.from_json(json.load(f))
    except (OSError, json.JSONDecodeError, KeyError) as e:
        raise UsageError(f"cannot read coefficients from {path}: {e}") from e


def _emit(payload, path: Optional[str], float_digits: int = 17):
    if path:
        JsonExporter(path, float_digits).export(payload)
        print(f"Saved to {path}")
    else:
        print(render_json(payload, float_digits), end="")


def _add_operator_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--spins", type=int, default=1, help="Number of spins (default: 1)")
    parser.add_argument("--J", type=str, default="1/2", help="Spin number of every spin (default: 1/2)")
    parser.add_argument("--param", action="append", metavar="NAME=VALUE", help="Expression parameter, repeatable")


def parse_args(argv: Optional[Sequence[str]] = None):
    parser = CliArgumentParser(prog="moyal-spin", description="Wigner functions of coupled spins")
    parser.add_argument("--verbose", action="store_true", help="Enable debug logging")
    parser.add_argument("--config", type=str, default=None, help="Run settings JSON file")
    subparsers = parser.add_subparsers(dest="command", parser_class=CliArgumentParser)

    scenario = subparsers.add_parser("scenario", help="Run a built-in or file scenario")
    scenario.add_argument("source", nargs="?", help="Built-in scenario name or scenario JSON file")
    scenario.add_argument("--list", action="store_true", help="List built-in scenarios")
    scenario.add_argument("--out", type=str, default=None, help="Output directory")
    scenario.add_argument("--seed", type=int, default=None, help="Seed for randomly fixed angles")
    scenario.add_argument("--resolution", type=int, default=None, help="Surface nodes per angle")

    op = subparsers.add_parser("op", help="Inspect an operator expression")
    op.add_argument("action", choices=["show", "decompose"])
    op.add_argument("expression", help="Operator expression or operator JSON file")
    _add_operator_arguments(op)

    transform = subparsers.add_parser("transform", help="Wigner coefficients of an operator")
    transform.add_argument("expression", help="Operator expression or operator JSON file")
    transform.add_argument("--emit", type=str, default=None, help="Write coefficient JSON here")
    _add_operator_arguments(transform)

    evaluate_cmd = subparsers.add_parser("eval", help="Evaluate a Wigner function at angles")
    evaluate_cmd.add_argument("--coeffs", required=True, help="Coefficient JSON file")
    evaluate_cmd.add_argument("--angles", type=float, nargs="+", required=True, help="theta_1 phi_1 theta_2 phi_2 ...")

    star = subparsers.add_parser("star", help="Star product of two Wigner functions")
    star.add_argument("--a", required=True, help="Left coefficient JSON file")
    star.add_argument("--b", required=True, help="Right coefficient JSON file")
    star.add_argument("--prestar", action="store_true", help="Emit the untruncated prestar product")
    star.add_argument("--emit", type=str, default=None, help="Write coefficient JSON here")

    evolve = subparsers.add_parser("evolve", help="Propagate a scenario on a time grid")
    evolve.add_argument("--scenario", required=True, help="Built-in scenario name or scenario JSON file")
    evolve.add_argument("--times", type=str, default=None, help="start:step:stop, overriding the scenario")
    evolve.add_argument("--emit", type=str, default=None, help="Write trajectory JSON here")
    evolve.add_argument("--oracle", action="store_true", help="Compare with exact matrix evolution")

    sample = subparsers.add_parser("sample", help="Sample one sphere of a Wigner function")
    sample.add_argument("--coeffs", required=True, help="Coefficient JSON file")
    sample.add_argument("--slot", type=int, default=1, help="Sphere to sample (default: 1)")
    sample.add_argument("--resolution", type=int, default=None, help="Nodes per angle")
    sample.add_argument("--fixed", type=float, nargs="+", default=None, help="Angles of the other spheres")
    sample.add_argument("--props", action="store_true", help="One surface per PROPS term")
    sample.add_argument("--format", choices=["csv", "json", "obj"], default="csv")
    sample.add_argument("--out", required=True, help="Output file (PROPS terms get a _term<k> suffix)")

    validate = subparsers.add_parser("validate", help="Check the Stratonovich postulates")
    validate.add_argument("--spins", type=int, default=1)
    validate.add_argument("--trials", type=int, default=100)
    validate.add_argument("--seed", type=int, default=None)
    validate.add_argument("--J", type=str, default="1/2")

    coeffs = subparsers.add_parser("coeffs", help="Coupling coefficient tables")
    coeffs.add_argument("action", choices=["dump"])
    coeffs.add_argument("--max-j", type=int, default=2, help="Largest rank tabulated (default: 2)")
    coeffs.add_argument("--out", type=str, default=None, help="CSV file; printed when omitted")

    args = parser.parse_args(argv)
    if args.command is None:
        parser.error("a subcommand is required")
    return args


def _time_grid(spec: str) -> List[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"--times must be start:step:stop, got {spec!r}")
    try:
        start, step, stop = (float(part) for part in parts)
    except ValueError as e:
        raise UsageError(f"--times has a non-numeric part: {spec!r}") from e
    return [start, step, stop]


def cmd_scenario(args, config: RunConfig) -> int:
    if args.list:
        for name, payload in BUILTIN_SCENARIOS.items():
            print(f"{name:<18} {payload['description']}")
        return EXIT_OK
    if not args.source:
        raise UsageError("scenario needs a name or file (see --list)")
    config = config.updated(out_dir=args.out, seed=args.seed, resolution=args.resolution)
    scenario = load_scenario(args.source)
    print(f"Running scenario {scenario.name} ({scenario.n_spins} spin(s))")
    run = run_scenario(scenario, config.out_dir, config)
    if not run.passed:
        print(f"Oracle deviation {run.oracle_report.max_deviation:.3e} exceeds {config.oracle_tolerance:g}")
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_op(args, config: RunConfig) -> int:
    op = _operator(args.expression, args)
    if args.action == "show":
        print(f"Operator on {op.n_spins} spin(s), J={op.spin_J}, dimension {op.dim}")
        with np.printoptions(precision=6, suppress=True, linewidth=120):
            print(op.matrix)
        return EXIT_OK
    for index, value in decompose(op).items():
        print(f"{value.real:+.12g}{value.imag:+.12g}j  {list(index)}")
    return EXIT_OK


def cmd_transform(args, config: RunConfig) -> int:
    _emit(wigner_transform(_operator(args.expression, args)), args.emit, config.float_digits)
    return EXIT_OK


def cmd_eval(args, config: RunConfig) -> int:
    w = _coeffs(args.coeffs)
    value = evaluate(w, SphereAngles.from_flat(args.angles))
    print(f"{value.real:.17g} {value.imag:.17g}")
    return EXIT_OK


def cmd_star(args, config: RunConfig) -> int:
    result = star_result(_coeffs(args.a), _coeffs(args.b))
    _emit(result.prestar if args.prestar else result.star, args.emit, config.float_digits)
    return EXIT_OK


def cmd_evolve(args, config: RunConfig) -> int:
    scenario = load_scenario(args.scenario)
    if args.times:
        start, step, stop = _time_grid(args.times)
        scenario.times = {"start": start, "step": step, "stop": stop}
    times = scenario.time_grid()
    H = scenario.hamiltonian_op()
    rho0 = scenario.initial_op()
    if args.oracle:
        report = compare_with_oracle(H, rho0, times)
        payload = report.trajectory.to_json(report.deviations)
        passed = report.passed(config.oracle_tolerance)
        print(f"Max oracle deviation {report.max_deviation:.3e}")
    else:
        trajectory = evolve_scenario(scenario, wigner_transform(H), wigner_transform(rho0), times)
        payload = trajectory.to_json()
        passed = True
    _emit(payload, args.emit, config.float_digits)
    return EXIT_OK if passed else EXIT_VALIDATION


def cmd_sample(args, config: RunConfig) -> int:
    w = _coeffs(args.coeffs)
    resolution = args.resolution or config.resolution
    fixed = None
    if args.fixed is not None:
        fixed = SphereAngles.from_flat(args.fixed).pairs
    out = Path(args.out)
    if args.props:
        for term_id, term in enumerate(props_decompose(w)):
            surface = sample_surface(term, args.slot, resolution, decomposition_id=term_id, num_workers=config.threads)
            path = out.with_name(f"{out.stem}_term{term_id}{out.suffix}")
            export(surface, path, args.format, config.float_digits)
            print(f"Saved to {path}")
        return EXIT_OK
    surface = sample_surface(w, args.slot, resolution, fixed_angles=fixed, num_workers=config.threads)
    export(surface, out, args.format, config.float_digits)
    print(f"Saved to {out}")
    return EXIT_OK


def cmd_validate(args, config: RunConfig) -> int:
    seed = config.seed if args.seed is None else args.seed
    report = validate_stratonovich(args.spins, args.trials, seed, args.J, progress=True)
    print(render_json(report), end="")
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_coeffs(args, config: RunConfig) -> int:
    rows = coefficient_rows(args.max_j)
    header = ["name", "j1", "j2", "L", "re", "im"]
    exporter = CsvTableExporter(args.out or "-", header, config.float_digits)
    if args.out:
        exporter.export(rows)
        print(f"Saved to {args.out}")
    else:
        print(exporter.render(rows), end="")
    return EXIT_OK


COMMANDS = {
    "scenario": cmd_scenario,
    "op": cmd_op,
    "transform": cmd_transform,
    "eval": cmd_eval,
    "star": cmd_star,
    "evolve": cmd_evolve,
    "sample": cmd_sample,
    "validate": cmd_validate,
    "coeffs": cmd_coeffs,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_args(argv)
    setup_logging(args.verbose)
    try:
        config = RunConfig.from_json(args.config) if args.config else RunConfig()
        return COMMANDS[args.command](args, config)
    except (UsageError, MoyalSpinError, OSError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
