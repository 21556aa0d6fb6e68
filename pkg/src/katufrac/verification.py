"""Closed-form oracle checks and grid-refinement studies.

Both are used by the ``verify`` and ``order`` subcommands; the checks run
at the operator parameters and interval of the loaded problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .bvp import ProblemSpec, SolveConfig, anti_periodic_residual, picard_solve, solve_linear
from .expr import Const, parse
from .operators import (
    Interval,
    OperatorParams,
    ck_derivative,
    ck_derivative_nodes,
    integral_nodes,
    katu_integral,
    power_ck_oracle,
    power_integral_oracle,
)
from .quadrature import DiscreteFunction, GridResolution, build_grid, sample
from .special import gamma_fn

REFINEMENT_LADDER = (64, 128, 256, 512, 1024, 2048, 4096)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tol)


def _shifted(p: OperatorParams, a: float) -> str:
    # ((t^rho - a^rho)/rho) as source text
    return f"((t^{p.rho!r} - {a**p.rho!r})/{p.rho!r})"


def _rel(value, exact):
    return abs(value - exact) / max(abs(exact), 1e-300)


def oracle_suite(p: OperatorParams, iv: Interval) -> list:
    """Run the oracle checks; each :class:`Check` records its defect and tolerance."""
    checks = []
    base = _shifted(p, iv.a)
    fine = GridResolution(4096, 2.0)
    for delta in (1.0, 1.5, 2.0, 3.0):
        h = parse(f"{base}^({delta!r} - 1)", {"t"})
        got = katu_integral(h, p, iv, iv.b, fine)
        checks.append(Check(f"power integral, delta={delta:g}", _rel(got, power_integral_oracle(delta, p, iv.a, iv.b)), 1e-6))
    for delta in (2.0, 3.0):
        h = parse(f"{base}^({delta!r} - 1)", {"t"})
        got = ck_derivative(h, p, iv, iv.b, GridResolution(4096))
        checks.append(Check(f"power CK derivative, delta={delta:g}", _rel(got, power_ck_oracle(delta, p, iv.a, iv.b)), 1e-6))
    checks.append(Check("CK derivative of a constant", abs(ck_derivative(Const(1.0), p, iv, iv.b)), 0.0))

    # smooth test function vanishing at a
    h_src = f"sin({base})"
    beta = 0.5 * (1.0 - p.alpha)
    grid = build_grid(iv, p, GridResolution(2048))
    h = DiscreteFunction(grid, sample(parse(h_src, {"t"}), grid.t_nodes))
    lhs = integral_nodes(integral_nodes(h, beta), p.alpha).values
    rhs = integral_nodes(h, p.alpha + beta).values
    checks.append(Check(f"semigroup, beta={beta:g}", float(np.max(np.abs(lhs - rhs))), 1e-5))

    grid = build_grid(iv, p, GridResolution(4096))
    h = DiscreteFunction(grid, sample(parse(h_src, {"t"}), grid.t_nodes))
    back = ck_derivative_nodes(integral_nodes(h, p.alpha), p.alpha)
    checks.append(Check("CK derivative inverts the integral", float(np.max(np.abs(back - h.values))), 1e-4))

    # manufactured linear problem: y = s^2 - s(b)^2/2 with s = (t^rho - a^rho)/rho
    g = parse(f"{gamma_fn(3.0)!r}/{gamma_fn(3.0 - p.alpha)!r}*{base}^{2.0 - p.alpha!r}", {"t"})
    y = solve_linear(g, p, iv, GridResolution(4096))
    s = (y.grid.t_nodes**p.rho - iv.a**p.rho) / p.rho
    exact = s**2 - 0.5 * s[-1] ** 2
    scale = max(1.0, float(np.max(np.abs(exact))))
    checks.append(Check("linear anti-periodic problem", float(np.max(np.abs(y.values - exact))) / scale, 1e-5))
    checks.append(Check("anti-periodic residual", anti_periodic_residual(y) / (1.0 + y.sup_norm()), 1e-12))
    return checks


@dataclass(frozen=True)
class RefinementRow:
    n: int
    sup_error: float
    observed_order: float  # NaN on the first row


def refinement_study(spec: ProblemSpec, y_exact, config: SolveConfig = SolveConfig(), ladder=REFINEMENT_LADDER):
    """Solve at each ``n`` of ``ladder`` and measure the sup error against ``y_exact``."""
    rows = []
    prev = None
    for n in ladder:
        cfg = replace(config, resolution=GridResolution(n, config.resolution.grading))
        report = picard_solve(spec, cfg)
        y = report.solution
        err = float(np.max(np.abs(y.values - sample(y_exact, y.grid.t_nodes))))
        order = math.log2(prev / err) if prev and err > 0 else math.nan
        rows.append(RefinementRow(n, err, order))
        prev = err
    return rows
