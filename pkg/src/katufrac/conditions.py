"""Existence and uniqueness constants for the anti-periodic problem.

Three criteria are checked:

* ``th1`` (Banach): a Lipschitz constant ``L`` with ``L * N < 1`` gives a
  unique solution.
* ``th2`` (Leray-Schauder): a growth bound ``|f(t,y)| <= eta(t) psi(|y|)``
  and some ``M > 0`` with ``N ||eta|| psi(M) / M < 1`` give a solution.
* ``th3`` (Krasnoselskii): a uniform bound ``q`` plus a Lipschitz function
  ``delta`` with ``Lambda < 1`` give a solution.

Sup norms of user functions are estimated on a dense uniform sample, so a
"guaranteed" verdict holds modulo that sampling.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .expr import DomainWarning, Expr, evaluate
from .special import gamma_fn

SUP_SAMPLES = 10_000
M_GRID = np.logspace(-6.0, 6.0, 1000)


class HypothesisError(ValueError):
    pass


class Verdict(str, enum.Enum):
    GUARANTEED = "guaranteed"
    NOT_GUARANTEED = "not-guaranteed"
    INAPPLICABLE = "inapplicable"


@dataclass(frozen=True)
class TheoremVerdict:
    status: Verdict
    reason: str


@dataclass(frozen=True)
class HypothesisData:
    lipschitz_L: Optional[float] = None
    eta: Optional[Expr] = None
    psi: Optional[Expr] = None
    q: Optional[Expr] = None
    delta_fn: Optional[Expr] = None
    mu: Optional[float] = None

    def __post_init__(self):
        if self.lipschitz_L is not None and not self.lipschitz_L >= 0:
            raise HypothesisError("lipschitz must be >= 0")


@dataclass
class ConditionReport:
    N: float
    Lambda: Optional[float] = None
    LN: Optional[float] = None
    M_found: Optional[float] = None
    r_ball: Optional[float] = None
    r0_ball: Optional[float] = None
    mu: Optional[float] = None
    verdicts: dict = field(default_factory=dict)


def _width_factor(p, iv):
    return p.rho**-p.alpha / gamma_fn(p.alpha + 1.0) * (iv.b**p.rho - iv.a**p.rho) ** p.alpha


def banach_constant(p, iv) -> float:
    """``N = 3/2 * rho**-alpha / Gamma(alpha+1) * (b**rho - a**rho)**alpha``."""
    return 1.5 * _width_factor(p, iv)


def _samples(iv):
    return np.linspace(iv.a, iv.b, SUP_SAMPLES)


def _sampled(e: Expr, name: str, bindings, nonnegative=True):
    with warnings.catch_warnings():
        warnings.simplefilter("error", DomainWarning)
        try:
            vals = evaluate(e, bindings)
        except DomainWarning as exc:
            raise HypothesisError(f"{name} is not evaluable on its sample: {exc}") from None
    shape = np.broadcast(*bindings.values()).shape
    vals = np.broadcast_to(np.asarray(vals, dtype=float), shape)
    if not np.all(np.isfinite(vals)):
        raise HypothesisError(f"{name} produced non-finite values on its sample")
    if nonnegative and np.any(vals < 0):
        raise HypothesisError(f"{name} must be nonnegative on J")
    return vals


def sup_norm(e: Expr, iv, name="function") -> float:
    """Max of ``|e(t)|`` over a uniform sample of ``J`` (a lower bound of the true sup)."""
    return float(np.max(np.abs(_sampled(e, name, {"t": _samples(iv)}, nonnegative=False))))


def krasnoselskii_constant(p, iv, delta_fn: Expr) -> float:
    """``Lambda = 1/2 * rho**-alpha * ||delta|| / Gamma(alpha+1) * (b**rho - a**rho)**alpha``."""
    return 0.5 * sup_norm(delta_fn, iv, "delta") * _width_factor(p, iv)


def _check_psi(psi: Expr):
    u = np.concatenate(([0.0], M_GRID))
    vals = _sampled(psi, "psi", {"u": u})
    if np.any(np.diff(vals) < 0):
        raise HypothesisError("psi must be nondecreasing")
    return vals[1:]


def leray_schauder_find_M(p, iv, eta: Expr, psi: Expr) -> Optional[float]:
    """Smallest ``M`` on a log grid over [1e-6, 1e6] with ``N ||eta|| psi(M) / M < 1``."""
    eta_norm = float(np.max(_sampled(eta, "eta", {"t": _samples(iv)})))
    psi_vals = _check_psi(psi)
    ratio = banach_constant(p, iv) * eta_norm * psi_vals / M_GRID
    hits = np.flatnonzero(ratio < 1.0)
    return float(M_GRID[hits[0]]) if hits.size else None


def compute_mu(f: Expr, iv) -> float:
    """``sup_t |f(t, 0)|`` over the dense sample."""
    t = _samples(iv)
    vals = _sampled(f, "f(t,0)", {"t": t, "y": np.zeros_like(t)}, nonnegative=False)
    return float(np.max(np.abs(vals)))


def check_all(spec) -> ConditionReport:
    """Constants, ball radii and a verdict per theorem for ``spec``."""
    p, iv, hyp = spec.params, spec.interval, spec.hypotheses
    N = banach_constant(p, iv)
    report = ConditionReport(N=N)
    note = " (sup norms estimated on a dense sample)"

    if hyp.eta is not None:
        _sampled(hyp.eta, "eta", {"t": _samples(iv)})
    if hyp.q is not None:
        _sampled(hyp.q, "q", {"t": _samples(iv)})
    if hyp.delta_fn is not None:
        _sampled(hyp.delta_fn, "delta", {"t": _samples(iv)})
    if hyp.psi is not None:
        _check_psi(hyp.psi)

    if hyp.lipschitz_L is not None:
        LN = hyp.lipschitz_L * N
        report.LN = LN
        report.mu = hyp.mu if hyp.mu is not None else compute_mu(spec.f, iv)
        if LN < 1.0:
            report.r_ball = report.mu * N / (1.0 - LN)
            report.verdicts["th1"] = TheoremVerdict(
                Verdict.GUARANTEED, f"L*N = {LN:.6g} < 1: unique solution in the ball of radius {report.r_ball:.6g}" + note
            )
        else:
            report.verdicts["th1"] = TheoremVerdict(Verdict.NOT_GUARANTEED, f"L*N = {LN:.6g} >= 1: no contraction guarantee")
    else:
        report.verdicts["th1"] = TheoremVerdict(Verdict.INAPPLICABLE, "no Lipschitz constant supplied")

    if hyp.eta is not None and hyp.psi is not None:
        report.M_found = leray_schauder_find_M(p, iv, hyp.eta, hyp.psi)
        if report.M_found is not None:
            report.verdicts["th2"] = TheoremVerdict(
                Verdict.GUARANTEED, f"N*||eta||*psi(M)/M < 1 at M = {report.M_found:.6g}: a solution exists" + note
            )
        else:
            report.verdicts["th2"] = TheoremVerdict(Verdict.NOT_GUARANTEED, "no M found in [1e-6,1e6]")
    else:
        report.verdicts["th2"] = TheoremVerdict(Verdict.INAPPLICABLE, "eta and psi are both required")

    if hyp.delta_fn is not None:
        report.Lambda = krasnoselskii_constant(p, iv, hyp.delta_fn)
    if hyp.q is not None:
        report.r0_ball = N * sup_norm(hyp.q, iv, "q") + 1.0
    if hyp.q is not None and hyp.delta_fn is not None:
        if report.Lambda < 1.0:
            report.verdicts["th3"] = TheoremVerdict(
                Verdict.GUARANTEED, f"Lambda = {report.Lambda:.6g} < 1: a solution exists in the ball of radius {report.r0_ball:.6g}" + note
            )
        else:
            report.verdicts["th3"] = TheoremVerdict(Verdict.NOT_GUARANTEED, f"Lambda = {report.Lambda:.6g} >= 1")
    else:
        report.verdicts["th3"] = TheoremVerdict(Verdict.INAPPLICABLE, "q and delta are both required")
    return report
