"""Acceptance gate: nine criteria, one PASS/FAIL line each in the terminal summary."""

import io
import json
import math
import time
from pathlib import Path

import jsonschema
import numpy as np

from katufrac import cli
from katufrac.bvp import ProblemSpec, SolveConfig, apply_T, picard_solve, solve_linear
from katufrac.conditions import HypothesisData, Verdict, check_all
from katufrac.expr import parse
from katufrac.operators import Interval, OperatorParams, ck_derivative_nodes, integral_nodes, katu_integral, power_integral_oracle
from katufrac.quadrature import DiscreteFunction, GridResolution, build_grid, sample
from katufrac.special import gamma_fn

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"
UNIT = Interval(0.0, 1.0)
HALF = OperatorParams(0.5, 1.0)
# L*N for L = 0.25: N = 1.5/Gamma(1.5) = 3/sqrt(pi)
LN_QUARTER = 0.75 / math.sqrt(math.pi)


def test_1_power_law_oracle(acceptance):
    start = time.perf_counter()
    worst = 0.0
    for delta in (1.0, 1.5, 3.0):
        for alpha in (0.3, 0.5, 0.9):
            for rho in (0.5, 1.0, 2.0):
                p = OperatorParams(alpha, rho)
                h = parse(f"(t^{rho!r}/{rho!r})^({delta!r} - 1)", {"t"})
                got = katu_integral(h, p, UNIT, 1.0, GridResolution(4096, 2.0))
                exact = power_integral_oracle(delta, p, 0.0, 1.0)
                worst = max(worst, abs(got - exact) / exact)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 10
    acceptance(1, ok, f"27 cases, worst relative error {worst:.2e} (<= 1e-6), {elapsed:.2f} s (< 10 s)")
    assert ok


def test_2_semigroup(acceptance):
    worst = 0.0
    for src in ("sin(t)", "t^2"):
        for alpha in (0.3, 0.5):
            for beta in (0.2, 0.4):
                g = build_grid(UNIT, OperatorParams(alpha, 1.0), GridResolution(2048))
                h = DiscreteFunction(g, sample(parse(src, {"t"}), g.t_nodes))
                lhs = integral_nodes(integral_nodes(h, beta), alpha).values
                rhs = integral_nodes(h, alpha + beta).values
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    ok = worst <= 1e-5
    acceptance(2, ok, f"sup defect {worst:.2e} (<= 1e-5) over 2 functions x 4 order pairs")
    assert ok


def test_3_inversion(acceptance):
    worst = 0.0
    for src in ("sin(t)", "t^2"):
        g = build_grid(UNIT, HALF, GridResolution(4096))
        h = DiscreteFunction(g, sample(parse(src, {"t"}), g.t_nodes))
        back = ck_derivative_nodes(integral_nodes(h, 0.5), 0.5)
        worst = max(worst, float(np.max(np.abs(back - h.values))))
    ok = worst <= 1e-4
    acceptance(3, ok, f"sup defect {worst:.2e} (<= 1e-4)")
    assert ok


def test_4_linear_bvp(acceptance):
    y = solve_linear(parse("2*sqrt(t)/sqrt(pi)", {"t"}), HALF, UNIT, GridResolution(4096, 2.0))
    err = float(np.max(np.abs(y.values - (y.grid.t_nodes - 0.5))))
    apr = abs(y.values[0] + y.values[-1])
    ok = err <= 1e-6 and apr <= 1e-12
    acceptance(4, ok, f"sup error {err:.2e} (<= 1e-6), anti-periodic residual {apr:.1e} (<= 1e-12)")
    assert ok


def _lambda_spec(lam):
    f = parse(f"{lam!r}*y + 2*sqrt(t)/sqrt(pi) - {lam!r}*(t - 1/2)", {"t", "y"})
    return ProblemSpec(HALF, UNIT, f, HypothesisData(lipschitz_L=lam))


def test_5_banach_contraction(acceptance):
    start = time.perf_counter()
    spec = _lambda_spec(0.25)
    report = check_all(spec)
    rep = picard_solve(spec, SolveConfig(GridResolution(1024, 2.0)))
    elapsed = time.perf_counter() - start
    terminal = max(rep.contraction_estimates[3:])
    ok = (
        rep.converged
        and terminal <= LN_QUARTER + 0.05
        and abs(report.LN - LN_QUARTER) <= 1e-12
        and report.verdicts["th1"].status is Verdict.GUARANTEED
        and elapsed < 5
    )
    acceptance(
        5, ok, f"LN = {report.LN:.6f} (closed form {LN_QUARTER:.6f}), max terminal contraction {terminal:.3f} (<= 0.473), {elapsed:.2f} s (< 5 s)"
    )
    assert ok


def test_6_verdict_boundary(acceptance):
    spec = _lambda_spec(1.0)
    report = check_all(spec)
    rep = picard_solve(spec, SolveConfig(GridResolution(1024, 2.0)))
    warned = any("no contraction guarantee" in w for w in rep.warnings)
    ok = abs(report.LN - 3 / math.sqrt(math.pi)) <= 1e-12 and report.verdicts["th1"].status is Verdict.NOT_GUARANTEED and warned
    acceptance(6, ok, f"LN = {report.LN:.4f} > 1, verdict {report.verdicts['th1'].status.value}, warning present: {warned}")
    assert ok


def test_7_equicontinuity(acceptance):
    p = HALF
    spec = ProblemSpec(p, UNIT, parse("sin(y) + t", {"t", "y"}))
    g = build_grid(UNIT, p, GridResolution(1024))
    rng = np.random.default_rng(20261018)
    # |f| = |sin(y) + t| <= 2 = eta * psi(r) on the ball of radius 2
    scale = 2 * p.rho**-p.alpha * 2.0 * 1.0 / gamma_fn(p.alpha + 1)
    y = DiscreteFunction(g, rng.uniform(-2, 2, g.n + 1))
    ty = apply_T(spec, y).values
    i, j = np.sort(rng.choice(g.n + 1, size=(2, 100)), axis=0)
    lhs = np.abs(ty[j] - ty[i])
    rhs = scale * (g.t_nodes[j] ** p.rho - g.t_nodes[i] ** p.rho) ** p.alpha + 1e-6
    slack = float(np.min(rhs - lhs))
    ok = bool(np.all(lhs <= rhs))
    acceptance(7, ok, f"100 node pairs, min slack {slack:.3e} (>= 0)")
    assert ok


def test_8_convergence_order(acceptance):
    start = time.perf_counter()
    out = io.StringIO()
    code = cli.run("order", FIXTURES / "quadratic.toml", stdout=out, stderr=io.StringIO())
    elapsed = time.perf_counter() - start
    rows = [line.split() for line in out.getvalue().splitlines()[1:]]
    ns = [int(r[0]) for r in rows]
    orders = [float(r[2]) for r in rows[1:]]
    ok = code == 0 and ns == [64, 128, 256, 512, 1024, 2048, 4096] and min(orders) >= 1.5 and elapsed < 30
    acceptance(8, ok, f"observed orders {min(orders):.3f}..{max(orders):.3f} (>= 1.5), {elapsed:.2f} s (< 30 s)")
    assert ok


CONTRACT = {
    "contraction.toml": {"check": 0, "solve": 0, "verify": 0, "order": 0},
    "boundary.toml": {"check": 0, "solve": 0, "verify": 0, "order": 0},
    "quadratic.toml": {"check": 0, "solve": 0, "verify": 0, "order": 0},
    "sine.toml": {"check": 0, "solve": 0, "verify": 0, "order": 1},
    "bad_alpha.toml": {"check": 1, "solve": 1, "verify": 1, "order": 1},
    "singular.toml": {"check": 0, "solve": 2, "verify": 0, "order": 1},
}


def test_9_cli_contract(acceptance, tmp_path):
    schema = json.loads((ROOT / "docs" / "report.schema.json").read_text())
    validator = jsonschema.Draft202012Validator(schema)
    failures = []
    for fixture, expected in CONTRACT.items():
        for command, want in expected.items():
            out = tmp_path / f"{fixture}-{command}"
            code = cli.run(command, FIXTURES / fixture, out, stdout=io.StringIO(), stderr=io.StringIO())
            if code != want:
                failures.append(f"{fixture} {command}: exit {code}, want {want}")
                continue
            if code == 0:
                errors = list(validator.iter_errors(json.loads((out / "report.json").read_text())))
                if errors:
                    failures.append(f"{fixture} {command}: {errors[0].message}")
    corpus = sorted(p.name for p in FIXTURES.glob("*.toml"))
    ok = not failures and corpus == sorted(CONTRACT)
    acceptance(9, ok, f"{len(corpus)} fixtures x 4 subcommands" + ("" if ok else f"; {failures[:3]}"))
    assert ok
