"""Product integration of the weakly singular Katugampola kernel.

After the substitution ``u = s**rho`` the integral becomes

    rho**-alpha / Gamma(alpha) * int_{a**rho}^{t**rho} (t**rho - u)**(alpha-1) h(u**(1/rho)) du,

an Abel integral in ``u``. The smooth factor is replaced by its
piecewise-linear interpolant on the ``u`` grid and the kernel moments are
integrated in closed form, so the rule is exact for integrands affine in
``u``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .expr import DomainWarning, Expr, evaluate
from .special import gamma_fn

# dense weight matrices above this size cost more memory than recomputation
DENSE_LIMIT = 2048


@dataclass(frozen=True)
class GridResolution:
    n: int = 1024
    grading: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if not 1.0 <= self.grading <= 5.0:
            raise ValueError(f"grading must lie in [1, 5], got {self.grading!r}")


@dataclass(frozen=True, eq=False)
class Grid:
    u_nodes: np.ndarray
    t_nodes: np.ndarray
    params: object
    interval: object
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.u_nodes.size - 1

    @property
    def rho(self) -> float:
        return self.params.rho

    @classmethod
    def from_t_nodes(cls, t_nodes, params, interval=None):
        """Grid through given physical nodes (e.g. reloaded from CSV)."""
        from .operators import Interval

        t = np.asarray(t_nodes, dtype=float)
        if t.ndim != 1 or t.size < 3 or np.any(np.diff(t) <= 0):
            raise ValueError("t_nodes must be a strictly increasing vector of length >= 3")
        if interval is None:
            interval = Interval(float(t[0]), float(t[-1]))
        return cls(t**params.rho, t.copy(), params, interval)


def build_grid(iv, p, res: GridResolution) -> Grid:
    """Nodes ``u_j = a**rho + (b**rho - a**rho) * (j/n)**grading``."""
    ua = iv.a**p.rho
    ub = iv.b**p.rho
    frac = np.arange(res.n + 1, dtype=float) / res.n
    u = ua + (ub - ua) * frac**res.grading
    t = u ** (1.0 / p.rho)
    t[0] = iv.a
    t[-1] = iv.b
    return Grid(u, t, p, iv)


class DiscreteFunction:
    """Samples on a :class:`Grid`, interpolated linearly in ``u``."""

    def __init__(self, grid: Grid, values, flagged: bool = False):
        values = np.array(values, dtype=float)
        if values.shape != (grid.n + 1,):
            raise ValueError(f"expected {grid.n + 1} values, got shape {values.shape}")
        if not flagged and not np.all(np.isfinite(values)):
            raise ValueError("non-finite samples in DiscreteFunction (pass flagged=True to keep them)")
        values.flags.writeable = False
        self.grid = grid
        self.values = values
        self.flagged = flagged

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.interp(t**self.grid.rho, self.grid.u_nodes, self.values)
        return float(out) if out.ndim == 0 else out

    def __len__(self):
        return self.values.size

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __repr__(self):
        return f"DiscreteFunction(n={self.grid.n}, flagged={self.flagged})"


def sample(h, t) -> np.ndarray:
    """Values of a problem function at the points ``t``.

    ``h`` may be an :class:`Expr` over ``t``, a :class:`DiscreteFunction`,
    a vectorised callable or a plain number.
    """
    t = np.asarray(t, dtype=float)
    if isinstance(h, Expr):
        vals = evaluate(h, {"t": t})
    elif isinstance(h, DiscreteFunction):
        vals = h(t)
    elif callable(h):
        vals = h(t)
    else:
        vals = float(h)
    vals = np.broadcast_to(np.asarray(vals, dtype=float), t.shape).copy()
    if not isinstance(h, Expr) and not np.all(np.isfinite(vals)):
        warnings.warn(f"non-finite samples of {h!r}", DomainWarning, stacklevel=2)
    return vals


def kernel_scale(rho: float, alpha: float) -> float:
    return rho**-alpha / gamma_fn(alpha)


def singular_weights(grid: Grid, j: int, alpha: float) -> np.ndarray:
    """Weights ``w_0..w_j`` with ``sum(w * h(t_i))`` approximating the integral at ``t_j``."""
    if not 0 <= j <= grid.n:
        raise IndexError(f"target index {j} outside 0..{grid.n}")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0,1), got {alpha!r}")
    if j == 0:
        return np.zeros(0)
    return kernel_scale(grid.rho, alpha) * kernels.weight_row(grid.u_nodes, j, alpha)


def integrate_singular(h, grid: Grid, j: int, alpha: float) -> float:
    if j == 0:
        return 0.0
    w = singular_weights(grid, j, alpha)
    return float(w @ sample(h, grid.t_nodes[: j + 1]))


def integrate_full_kernel_b(h, grid: Grid, alpha: float) -> float:
    """Integral with the kernel anchored at the right endpoint ``b``."""
    return integrate_singular(h, grid, grid.n, alpha)


def weight_matrix(grid: Grid, alpha: float) -> np.ndarray:
    """Scaled lower-triangular weight matrix, cached on the grid."""
    key = ("W", float(alpha))
    W = grid._cache.get(key)
    if W is None:
        W = kernel_scale(grid.rho, alpha) * kernels.weight_matrix(grid.u_nodes, alpha)
        W.flags.writeable = False
        grid._cache[key] = W
    return W


def integrate_nodes(values, grid: Grid, alpha: float) -> np.ndarray:
    """The fractional integral of sampled values at every grid node.

    Entry ``j`` equals ``integrate_singular`` at target ``j``; entry 0 is 0.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0,1), got {alpha!r}")
    values = np.asarray(values, dtype=float)
    if grid.n <= DENSE_LIMIT:
        return weight_matrix(grid, alpha) @ values
    return kernel_scale(grid.rho, alpha) * kernels.integrate_all(grid.u_nodes, values, alpha)
