"""Katugampola fractional operators and the anti-periodic fractional BVP."""

from .bvp import (
    ProblemSpec,
    SolveConfig,
    SolveReport,
    SolverNaNError,
    anti_periodic_residual,
    apply_T,
    c0_coefficient,
    picard_solve,
    residual_ck,
    solve_linear,
)
from .conditions import (
    ConditionReport,
    HypothesisData,
    HypothesisError,
    Verdict,
    banach_constant,
    check_all,
    compute_mu,
    krasnoselskii_constant,
    leray_schauder_find_M,
)
from .expr import Expr, differentiate, evaluate, parse, to_source
from .kernels import BACKEND
from .operators import (
    Interval,
    OperatorParams,
    ck_derivative,
    gamma_derivative,
    katu_derivative,
    katu_integral,
    power_ck_oracle,
    power_integral_oracle,
)
from .quadrature import (
    DiscreteFunction,
    Grid,
    GridResolution,
    build_grid,
    integrate_full_kernel_b,
    integrate_singular,
    singular_weights,
)
from .special import gamma_fn

__version__ = "0.1.0"
