"""Katugampola and Caputo-Katugampola operators of order 0 < alpha < 1."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .expr import Expr, differentiate, evaluate
from .quadrature import (
    DiscreteFunction,
    GridResolution,
    build_grid,
    integrate_nodes,
    integrate_singular,
    sample,
)
from .special import gamma_fn

RHO_MIN = 1e-6
# spacing in u of the three probes used to extrapolate the gamma-derivative to t = 0
_LIMIT_PROBE = 1e-5


@dataclass(frozen=True)
class OperatorParams:
    alpha: float
    rho: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0,1)")
        if not self.rho >= RHO_MIN:
            raise ValueError(f"rho must be >= {RHO_MIN:g}")


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("interval endpoints must be finite")
        if self.a < 0:
            raise ValueError("interval requires a >= 0")
        if not self.a < self.b:
            raise ValueError("interval requires a < b")


def _subinterval(iv: Interval, t: float) -> Interval:
    if t < iv.a:
        raise ValueError(f"t={t} lies left of a={iv.a}")
    if t > iv.b * (1 + 1e-14):
        raise ValueError(f"t={t} lies right of b={iv.b}")
    return Interval(iv.a, t)


def katu_integral(h, p: OperatorParams, iv: Interval, t: float, res: GridResolution = GridResolution()) -> float:
    """Left-sided Katugampola integral ``I^{alpha;rho}_{a+} h`` at ``t``.

    A fresh grid with resolution ``res`` spans ``[a, t]``.
    """
    if t == iv.a:
        return 0.0
    grid = build_grid(_subinterval(iv, t), p, res)
    return integrate_singular(h, grid, grid.n, p.alpha)


@lru_cache(maxsize=64)
def _derivative_expr(h: Expr) -> Expr:
    return differentiate(h, "t")


def _expr_gamma_derivative(h: Expr, rho: float, t: np.ndarray) -> np.ndarray:
    d = _derivative_expr(h)
    out = np.empty_like(t)
    pos = t > 0
    if pos.any():
        tp = t[pos]
        dv = np.broadcast_to(evaluate(d, {"t": tp}), tp.shape)
        out[pos] = dv if rho == 1.0 else tp ** (1.0 - rho) * dv
    if (~pos).any():
        out[~pos] = _gamma_derivative_at_zero(h, d, rho)
    return out


def _gamma_derivative_at_zero(h, d, rho):
    d0 = evaluate(d, {"t": 0.0})
    if rho == 1.0:
        return d0
    if rho < 1.0:
        # prefactor t**(1-rho) vanishes
        if not math.isfinite(d0):
            raise ValueError("gamma-derivative undefined at t=0: h'(0) is not finite")
        return 0.0
    if math.isfinite(d0) and d0 != 0.0:
        raise ValueError("gamma-derivative is singular at t=0 for rho > 1 when h'(0) != 0")
    # prefactor t**(1-rho) blows up; take the limit along u = t**rho by
    # quadratic extrapolation from three probes
    u = _LIMIT_PROBE * np.array([1.0, 2.0, 3.0])
    tk = u ** (1.0 / rho)
    g = tk ** (1.0 - rho) * np.broadcast_to(evaluate(d, {"t": tk}), tk.shape)
    if not np.all(np.isfinite(g)):
        raise ValueError("gamma-derivative has no finite limit at t=0")
    return float(3.0 * g[0] - 3.0 * g[1] + g[2])


def _du(values, u) -> np.ndarray:
    # second-order non-uniform differences (np.gradient's stencil, one-sided at the ends),
    # written over divided differences so constant data gives exact zeros
    h = np.diff(u)
    d = np.diff(values) / h
    if d.size == 1:
        return np.full(2, d[0])
    h1, h2, d1, d2 = h[:-1], h[1:], d[:-1], d[1:]
    out = np.empty(values.size)
    out[1:-1] = (h2 * d1 + h1 * d2) / (h1 + h2)
    out[0] = ((2 * h[0] + h[1]) * d[0] - h[0] * d[1]) / (h[0] + h[1])
    out[-1] = ((2 * h[-1] + h[-2]) * d[-1] - h[-1] * d[-2]) / (h[-1] + h[-2])
    return out


def _discrete_gamma_derivative(h: DiscreteFunction) -> np.ndarray:
    # t**(1-rho) d/dt == rho d/du
    return h.grid.rho * _du(h.values, h.grid.u_nodes)


def gamma_derivative_values(h, rho: float, t) -> np.ndarray:
    """Vectorised :func:`gamma_derivative`."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if isinstance(h, Expr):
        return _expr_gamma_derivative(h, rho, t)
    if isinstance(h, DiscreteFunction):
        if rho != h.grid.rho:
            raise ValueError("rho differs from the grid's rho")
        gd = _discrete_gamma_derivative(h)
        return np.interp(t**rho, h.grid.u_nodes, gd)
    if callable(h):
        step = 1e-5 * np.maximum(1.0, np.abs(t))
        dv = (sample(h, t + step) - sample(h, t - step)) / (2 * step)
        return t ** (1.0 - rho) * dv
    return np.zeros_like(t)


def gamma_derivative(h, rho: float, t: float) -> float:
    """``t**(1-rho) * h'(t)``; symbolic for expressions, finite differences otherwise."""
    if t < 0:
        raise ValueError("gamma_derivative needs t >= 0")
    return float(gamma_derivative_values(h, rho, t)[0])


def ck_derivative(h, p: OperatorParams, iv: Interval, t: float, res: GridResolution = GridResolution()) -> float:
    """Caputo-Katugampola derivative at ``t`` as ``I^{1-alpha;rho}`` of the gamma-derivative."""
    if t == iv.a:
        return 0.0
    grid = build_grid(_subinterval(iv, t), p, res)
    g = gamma_derivative_values(h, p.rho, grid.t_nodes)
    return integrate_singular(DiscreteFunction(grid, g, flagged=True), grid, grid.n, 1.0 - p.alpha)


def ck_derivative_nodes(y: DiscreteFunction, alpha: float) -> np.ndarray:
    """CK derivative of sampled data at every node of its grid (0 at ``t = a``)."""
    g = _discrete_gamma_derivative(y)
    return integrate_nodes(g, y.grid, 1.0 - alpha)


def integral_nodes(y: DiscreteFunction, alpha: float) -> DiscreteFunction:
    """Katugampola integral of sampled data at every node of its grid."""
    return DiscreteFunction(y.grid, integrate_nodes(y.values, y.grid, alpha), flagged=y.flagged)


def katu_derivative(h, p: OperatorParams, iv: Interval, t: float, res: GridResolution = GridResolution()) -> float:
    """Katugampola (Riemann-Liouville type) derivative at ``t > a``.

    The CK derivative plus the contribution of the constant ``h(a)``.
    """
    if t <= iv.a:
        raise ValueError("katu_derivative is singular at t = a")
    ha = float(sample(h, np.array([iv.a]))[0])
    base = (t**p.rho - iv.a**p.rho) / p.rho
    return ck_derivative(h, p, iv, t, res) + ha * base**-p.alpha / gamma_fn(1.0 - p.alpha)


def _base(p, a, t):
    t = np.asarray(t, dtype=float)
    if np.any(t < a):
        raise ValueError("power oracles need t >= a")
    return np.maximum((t**p.rho - a**p.rho) / p.rho, 0.0)


def _finish(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def power_integral_oracle(delta: float, p: OperatorParams, a: float, t):
    """Exact Katugampola integral of ``((t**rho - a**rho)/rho)**(delta-1)``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    base = _base(p, a, t)
    with np.errstate(divide="ignore"):
        return _finish(gamma_fn(delta) / gamma_fn(delta + p.alpha) * base ** (p.alpha + delta - 1.0))


def power_ck_oracle(delta: float, p: OperatorParams, a: float, t):
    """Exact CK derivative of ``((t**rho - a**rho)/rho)**(delta-1)``; zero for the constant."""
    if not delta > p.alpha:
        raise ValueError("power_ck_oracle requires delta > alpha")
    base = _base(p, a, t)
    if delta == 1.0:
        return _finish(np.zeros_like(base))
    with np.errstate(divide="ignore"):
        return _finish(gamma_fn(delta) / gamma_fn(delta - p.alpha) * base ** (delta - p.alpha - 1.0))

