"""JSON reports and CSV solution tables.

Files are written to a temporary sibling and renamed into place, so an
aborted run never leaves a truncated output behind.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .quadrature import DiscreteFunction, Grid

SCHEMA_VERSION = 1


def write_atomic(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def solution_csv(y: DiscreteFunction) -> str:
    buf = io.StringIO()
    buf.write("t,y\n")
    for t, v in zip(y.grid.t_nodes, y.values):
        buf.write(f"{t:.17g},{v:.17g}\n")
    return buf.getvalue()


def read_solution_csv(path, params) -> DiscreteFunction:
    """Reload a solution table written by :func:`solution_csv`."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["t", "y"]:
        raise ValueError(f"{path}: expected header 't,y'")
    data = np.array([[float(t), float(v)] for t, v in rows[1:]])
    grid = Grid.from_t_nodes(data[:, 0], params)
    return DiscreteFunction(grid, data[:, 1])


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def condition_fields(cond) -> dict:
    return {
        "n_constant": cond.N,
        "lambda_constant": _num(cond.Lambda),
        "ln_product": _num(cond.LN),
        "mu": _num(cond.mu),
        "m_found": _num(cond.M_found),
        "r_ball": _num(cond.r_ball),
        "r0_ball": _num(cond.r0_ball),
        "verdicts": {k: v.status.value for k, v in sorted(cond.verdicts.items())},
        "verdict_reasons": {k: v.reason for k, v in sorted(cond.verdicts.items())},
    }


def solve_fields(rep, solution_path) -> dict:
    return {
        "iterations": rep.iterations,
        "converged": rep.converged,
        "residual_history": [_num(r) for r in rep.residual_history],
        "contraction_estimates": [_num(r) for r in rep.contraction_estimates],
        "anti_periodic_residual": rep.anti_periodic_residual,
        "solution_path": None if solution_path is None else str(solution_path),
        "warnings": list(rep.warnings),
    }


def base_report(command: str, spec, config) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "problem": {
            "alpha": spec.params.alpha,
            "rho": spec.params.rho,
            "a": spec.interval.a,
            "b": spec.interval.b,
            "f": str(spec.f),
            "n": config.resolution.n,
            "grading": config.resolution.grading,
            "tol": config.tol,
            "max_iter": config.max_iter,
        },
    }


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"
