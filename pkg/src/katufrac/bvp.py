"""The anti-periodic problem ``CK-D^{alpha;rho} y = f(t, y)``, ``y(a) + y(b) = 0``.

Solutions are fixed points of

    (T y)(t) = c0 + I^{alpha;rho}[f(., y)](t),   c0 = -1/2 * I^{alpha;rho}[f(., y)](b),

which :func:`picard_solve` iterates. The constant ``c0`` is read off the
same weight matrix as the running integral, so every iterate satisfies the
boundary condition up to round-off.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .conditions import HypothesisData, banach_constant
from .expr import DomainWarning, Expr, evaluate
from .operators import Interval, OperatorParams, ck_derivative_nodes
from .quadrature import DiscreteFunction, Grid, GridResolution, build_grid, integrate_nodes, sample

log = logging.getLogger(__name__)

# consecutive growing residuals that count as divergence when no contraction is guaranteed
DIVERGENCE_RUN = 5


class SolverNaNError(RuntimeError):
    """``f`` produced a non-finite value during the solve."""

    def __init__(self, message, iteration=None):
        if iteration is not None:
            message = f"iteration {iteration}: {message}"
        super().__init__(message)
        self.iteration = iteration


@dataclass(frozen=True)
class ProblemSpec:
    params: OperatorParams
    interval: Interval
    f: Expr
    hypotheses: HypothesisData = HypothesisData()

    def __post_init__(self):
        extra = self.f.variables - {"t", "y"}
        if extra:
            raise ValueError(f"f may only use t and y, found {sorted(extra)}")


@dataclass(frozen=True)
class SolveConfig:
    resolution: GridResolution = GridResolution()
    tol: float = 1e-10
    max_iter: int = 200
    y0: object = 0.0

    def __post_init__(self):
        if not self.tol >= 1e-14:
            raise ValueError("tol must be >= 1e-14")
        if not 1 <= self.max_iter <= 100_000:
            raise ValueError("max_iter must lie in [1, 1e5]")


@dataclass
class SolveReport:
    solution: DiscreteFunction
    iterations: int
    residual_history: list
    contraction_estimates: list
    anti_periodic_residual: float
    converged: bool
    warnings: list = field(default_factory=list)


def anti_periodic_residual(y: DiscreteFunction) -> float:
    """``|y(a) + y(b)|``."""
    return float(abs(y.values[0] + y.values[-1]))


def _linear_values(g_values, grid: Grid, alpha: float) -> np.ndarray:
    integral = integrate_nodes(g_values, grid, alpha)
    c0 = -0.5 * integral[-1]
    return c0 + integral


def c0_coefficient(g: DiscreteFunction, alpha: float = None) -> float:
    """``-1/2`` times the full-kernel integral of ``g`` anchored at ``b``."""
    alpha = g.grid.params.alpha if alpha is None else alpha
    return -0.5 * float(integrate_nodes(g.values, g.grid, alpha)[-1])


def solve_linear(g, p: OperatorParams, iv: Interval, res: GridResolution = GridResolution()) -> DiscreteFunction:
    """Unique solution of ``CK-D y = g`` with ``y(a) + y(b) = 0`` on a fresh grid."""
    grid = build_grid(iv, p, res)
    gv = sample(g, grid.t_nodes)
    flagged = not np.all(np.isfinite(gv))
    return DiscreteFunction(grid, _linear_values(gv, grid, p.alpha), flagged=flagged)


def _forcing(spec: ProblemSpec, y: DiscreteFunction, iteration=None) -> np.ndarray:
    t = y.grid.t_nodes
    g = np.broadcast_to(evaluate(spec.f, {"t": t, "y": y.values}), t.shape)
    bad = np.flatnonzero(~np.isfinite(g))
    if bad.size:
        j = int(bad[0])
        raise SolverNaNError(f"f(t, y) is not finite at node {j} (t={float(t[j])!r}, y={float(y.values[j])!r})", iteration)
    return g


def _check_grid(spec: ProblemSpec, grid: Grid):
    if grid.interval != spec.interval or grid.params != spec.params:
        raise ValueError("y lives on a grid for a different interval or operator")


def apply_T(spec: ProblemSpec, y: DiscreteFunction) -> DiscreteFunction:
    """One application of the solution operator on ``y``'s grid."""
    _check_grid(spec, y.grid)
    g = _forcing(spec, y)
    return DiscreteFunction(y.grid, _linear_values(g, y.grid, spec.params.alpha))


def _initial(cfg: SolveConfig, grid: Grid) -> DiscreteFunction:
    if isinstance(cfg.y0, DiscreteFunction) and cfg.y0.grid is grid:
        return cfg.y0
    return DiscreteFunction(grid, sample(cfg.y0, grid.t_nodes))


def picard_solve(spec: ProblemSpec, cfg: SolveConfig = SolveConfig(), grid: Grid = None) -> SolveReport:
    """Iterate ``y_{k+1} = T y_k`` until the sup-norm step drops below ``cfg.tol``."""
    grid = grid or build_grid(spec.interval, spec.params, cfg.resolution)
    notes = []
    L = spec.hypotheses.lipschitz_L
    LN = None if L is None else L * banach_constant(spec.params, spec.interval)
    guaranteed = LN is not None and LN < 1.0
    if not guaranteed:
        detail = "no Lipschitz constant supplied" if LN is None else f"L*N = {LN:.6g} >= 1"
        notes.append(f"no contraction guarantee ({detail}); iteration is best-effort")

    residuals, ratios = [], []
    converged = False
    growing = 0
    alpha = spec.params.alpha
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DomainWarning)
        y = _initial(cfg, grid)
        for k in range(1, cfg.max_iter + 1):
            g = _forcing(spec, y, iteration=k)
            y_next = DiscreteFunction(grid, _linear_values(g, grid, alpha), flagged=True)
            if not np.all(np.isfinite(y_next.values)):
                raise SolverNaNError("iterate is not finite", k)
            step = float(np.max(np.abs(y_next.values - y.values)))
            if residuals:
                ratios.append(step / residuals[-1] if residuals[-1] > 0 else 0.0)
                growing = growing + 1 if step > residuals[-1] else 0
            residuals.append(step)
            y = y_next
            log.debug("picard iteration %d: step %.3e", k, step)
            if step <= cfg.tol:
                converged = True
                break
            if not guaranteed and growing >= DIVERGENCE_RUN:
                notes.append(f"diverging: {DIVERGENCE_RUN} consecutive growing steps at iteration {k}")
                break
        else:
            notes.append(f"max_iter = {cfg.max_iter} reached without meeting tol = {cfg.tol:g}")
    for w in caught:
        msg = f"{w.category.__name__}: {w.message}"
        if msg not in notes:
            notes.append(msg)

    solution = DiscreteFunction(grid, y.values)
    return SolveReport(
        solution=solution,
        iterations=len(residuals),
        residual_history=residuals,
        contraction_estimates=ratios,
        anti_periodic_residual=anti_periodic_residual(solution),
        converged=converged,
        warnings=notes,
    )


def residual_ck(spec: ProblemSpec, y: DiscreteFunction) -> float:
    """Max defect ``|CK-D y - f(t, y)|`` over the nodes ``t_1..t_n``."""
    _check_grid(spec, y.grid)
    lhs = ck_derivative_nodes(y, spec.params.alpha)
    rhs = np.broadcast_to(evaluate(spec.f, {"t": y.grid.t_nodes, "y": y.values}), lhs.shape)
    return float(np.max(np.abs(lhs[1:] - rhs[1:])))
