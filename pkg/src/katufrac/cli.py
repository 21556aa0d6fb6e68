"""Command-line interface.

Usage::

    katufrac check  problem.toml            # existence/uniqueness report (JSON on stdout)
    katufrac solve  problem.toml --out DIR  # solution.csv + report.json in DIR
    katufrac verify problem.toml            # oracle suite, exit 3 on any failure
    katufrac order  problem.toml            # refinement study against [manufactured]

Exit codes: 0 success, 1 invalid input, 2 solver abort on a non-finite
value, 3 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import sys
from pathlib import Path

from .bvp import SolverNaNError, picard_solve
from .conditions import HypothesisError, check_all
from .problemfile import ProblemFileError, load_problem
from .quadrature import GridResolution
from .report import base_report, condition_fields, solution_csv, solve_fields, to_json, write_atomic
from .verification import REFINEMENT_LADDER, oracle_suite, refinement_study

__all__ = ["main", "run"]

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_SOLVER = 2
EXIT_VERIFY = 3

COMMANDS = ("check", "solve", "verify", "order")

log = logging.getLogger("katufrac")


def _apply_overrides(config, n, tol):
    if n is not None:
        config = dataclasses.replace(config, resolution=GridResolution(n, config.resolution.grading))
    if tol is not None:
        config = dataclasses.replace(config, tol=tol)
    return config


def run(command, path, out_dir=None, n=None, tol=None, stdout=None, stderr=None) -> int:
    """Execute one subcommand and return its exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if command not in COMMANDS:
        print(f"error: unknown command {command!r}", file=stderr)
        return EXIT_INVALID
    try:
        problem = load_problem(path)
        config = _apply_overrides(problem.config, n, tol)
        spec = problem.spec
        conditions = check_all(spec)
    except (ProblemFileError, HypothesisError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID

    out = Path(out_dir) if out_dir is not None else None
    report = base_report(command, spec, config)
    report.update(condition_fields(conditions))

    if command == "check":
        text = to_json(report)
        stdout.write(text)
        if out is not None:
            write_atomic(out / "report.json", text)
        return EXIT_OK

    if command == "solve":
        out = out or Path(".")
        try:
            result = picard_solve(spec, config)
        except SolverNaNError as exc:
            print(f"error: solver aborted: {exc}", file=stderr)
            return EXIT_SOLVER
        csv_path = out / "solution.csv"
        report.update(solve_fields(result, csv_path))
        write_atomic(csv_path, solution_csv(result.solution))
        write_atomic(out / "report.json", to_json(report))
        for w in result.warnings:
            print(f"warning: {w}", file=stderr)
        status = "converged" if result.converged else "did not converge"
        print(f"{status} after {result.iterations} iteration(s); wrote {csv_path}", file=stdout)
        return EXIT_OK

    if command == "verify":
        try:
            checks = oracle_suite(spec.params, spec.interval)
        except (ValueError, ArithmeticError) as exc:
            print(f"error: oracle suite aborted: {exc}", file=stderr)
            return EXIT_VERIFY
        width = max(len(c.name) for c in checks)
        print(f"{'check':<{width}}  {'defect':>10}  {'tol':>8}  result", file=stdout)
        for c in checks:
            print(f"{c.name:<{width}}  {c.value:10.3e}  {c.tol:8.1e}  {'PASS' if c.passed else 'FAIL'}", file=stdout)
        report["oracle_checks"] = [
            {"name": c.name, "defect": c.value, "tol": c.tol, "passed": c.passed} for c in checks
        ]
        if out is not None:
            write_atomic(out / "report.json", to_json(report))
        return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY

    # order
    if problem.y_exact is None:
        print("error: order needs [manufactured].y_exact", file=stderr)
        return EXIT_INVALID
    ladder = REFINEMENT_LADDER if n is None else tuple(m for m in REFINEMENT_LADDER if m <= n)
    try:
        rows = refinement_study(spec, problem.y_exact, config, ladder)
    except SolverNaNError as exc:
        print(f"error: solver aborted: {exc}", file=stderr)
        return EXIT_SOLVER
    print(f"{'n':>6}  {'sup-error':>12}  observed order", file=stdout)
    for r in rows:
        order = "" if math.isnan(r.observed_order) else f"{r.observed_order:.3f}"
        print(f"{r.n:>6}  {r.sup_error:12.4e}  {order}", file=stdout)
    report["refinement"] = [
        {"n": r.n, "sup_error": r.sup_error, "observed_order": None if math.isnan(r.observed_order) else r.observed_order}
        for r in rows
    ]
    if out is not None:
        write_atomic(out / "report.json", to_json(report))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; exit code 2 is reserved for solver aborts
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def main(argv=None) -> int:
    parser = _Parser(prog="katufrac", description="Katugampola fractional BVP toolkit.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("problem", help="TOML problem file")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--n", type=int, default=None, help="override solver.n")
    parser.add_argument("--tol", type=float, default=None, help="override solver.tol")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    return run(args.command, args.problem, args.out, args.n, args.tol)


if __name__ == "__main__":
    sys.exit(main())
