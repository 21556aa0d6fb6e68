"""TOML problem files.

::

    [problem]            # required
    alpha = 0.5
    rho = 1.0
    a = 0.0
    b = 1.0
    f = "0.25*y + t"     # over t, y

    [hypotheses]         # optional
    lipschitz = 0.25
    eta = "2"            # over t
    psi = "1"            # over u
    q = "1 + t"          # over t
    delta = "0.25"       # over t
    mu = 1.0

    [solver]             # optional
    n = 1024
    grading = 1.0
    tol = 1e-10
    max_iter = 200

    [manufactured]       # optional
    y_exact = "t - 1/2"  # over t
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import NamedTuple, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .bvp import ProblemSpec, SolveConfig
from .conditions import HypothesisData
from .expr import Expr, ExprError, parse
from .operators import Interval, OperatorParams
from .quadrature import GridResolution

DEFAULT_N = 1024
DEFAULT_GRADING = 1.0
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200

_KEYS = {
    "problem": {"alpha", "rho", "a", "b", "f"},
    "hypotheses": {"lipschitz", "eta", "psi", "q", "delta", "mu"},
    "solver": {"n", "grading", "tol", "max_iter"},
    "manufactured": {"y_exact"},
}
_EXPR_VARS = {
    ("problem", "f"): {"t", "y"},
    ("hypotheses", "eta"): {"t"},
    ("hypotheses", "psi"): {"u"},
    ("hypotheses", "q"): {"t"},
    ("hypotheses", "delta"): {"t"},
    ("manufactured", "y_exact"): {"t"},
}


class ProblemFileError(ValueError):
    pass


class LoadedProblem(NamedTuple):
    spec: ProblemSpec
    config: SolveConfig
    y_exact: Optional[Expr]
    path: Path


_REQUIRED = object()


def _number(table, section, key, default=_REQUIRED, integer=False):
    if key not in table:
        if default is _REQUIRED:
            raise ProblemFileError(f"missing required key {section}.{key}")
        return default
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProblemFileError(f"{section}.{key} must be a number, got {type(value).__name__}")
    if integer and int(value) != value:
        raise ProblemFileError(f"{section}.{key} must be an integer")
    return int(value) if integer else float(value)


def _expression(table, section, key, required=False):
    if key not in table:
        if required:
            raise ProblemFileError(f"missing required key {section}.{key}")
        return None
    source = table[key]
    if not isinstance(source, str):
        raise ProblemFileError(f"{section}.{key} must be an expression string")
    try:
        return parse(source, _EXPR_VARS[(section, key)])
    except ExprError as exc:
        raise ProblemFileError(f"{exc} in {key}") from None


def load_problem(path) -> LoadedProblem:
    """Read and validate a problem file, applying solver defaults."""
    path = Path(path)
    try:
        with path.open("rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ProblemFileError(f"{path}: {exc.strerror or exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ProblemFileError(f"{path}: {exc}") from None
    try:
        return _build(doc, path)
    except ProblemFileError as exc:
        raise ProblemFileError(f"{path}: {exc}") from None


def _build(doc, path):
    for section, table in doc.items():
        if section not in _KEYS:
            raise ProblemFileError(f"unknown table [{section}]")
        if not isinstance(table, dict):
            raise ProblemFileError(f"[{section}] must be a table")
        unknown = set(table) - _KEYS[section]
        if unknown:
            raise ProblemFileError(f"unknown key {section}.{sorted(unknown)[0]}")
    if "problem" not in doc:
        raise ProblemFileError("missing table [problem]")

    prob = doc["problem"]
    alpha, rho = _number(prob, "problem", "alpha"), _number(prob, "problem", "rho")
    a, b = _number(prob, "problem", "a"), _number(prob, "problem", "b")
    try:
        params = OperatorParams(alpha, rho)
        interval = Interval(a, b)
    except ValueError as exc:
        raise ProblemFileError(str(exc)) from None
    f = _expression(prob, "problem", "f", required=True)

    hyp = doc.get("hypotheses", {})
    lipschitz = _number(hyp, "hypotheses", "lipschitz", default=None)
    if lipschitz is not None and lipschitz < 0:
        raise ProblemFileError("hypotheses.lipschitz must be >= 0")
    hypotheses = HypothesisData(
        lipschitz_L=lipschitz,
        eta=_expression(hyp, "hypotheses", "eta"),
        psi=_expression(hyp, "hypotheses", "psi"),
        q=_expression(hyp, "hypotheses", "q"),
        delta_fn=_expression(hyp, "hypotheses", "delta"),
        mu=_number(hyp, "hypotheses", "mu", default=None),
    )

    solver = doc.get("solver", {})
    n = _number(solver, "solver", "n", DEFAULT_N, integer=True)
    grading = _number(solver, "solver", "grading", DEFAULT_GRADING)
    tol = _number(solver, "solver", "tol", DEFAULT_TOL)
    max_iter = _number(solver, "solver", "max_iter", DEFAULT_MAX_ITER, integer=True)
    try:
        config = SolveConfig(GridResolution(n, grading), tol, max_iter)
    except ValueError as exc:
        raise ProblemFileError(str(exc)) from None

    y_exact = _expression(doc.get("manufactured", {}), "manufactured", "y_exact")
    return LoadedProblem(ProblemSpec(params, interval, f, hypotheses), config, y_exact, path)
