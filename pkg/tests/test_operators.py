import math

import numpy as np
import pytest
from scipy import integrate

from katufrac.expr import Const, parse
from katufrac.operators import (
    Interval,
    OperatorParams,
    ck_derivative,
    ck_derivative_nodes,
    gamma_derivative,
    integral_nodes,
    katu_derivative,
    katu_integral,
    power_ck_oracle,
    power_integral_oracle,
)
from katufrac.quadrature import DiscreteFunction, GridResolution, build_grid, sample
from katufrac.special import gamma_fn

UNIT = Interval(0.0, 1.0)
HALF = OperatorParams(0.5, 1.0)
INV_GAMMA_15 = 2 / math.sqrt(math.pi)


def T(src):
    return parse(src, {"t"})


@pytest.mark.parametrize("alpha, rho", [(0.0, 1.0), (1.0, 1.0), (-0.2, 1.0), (0.5, 0.0), (0.5, 1e-7), (math.nan, 1.0)])
def test_params_invariants(alpha, rho):
    with pytest.raises(ValueError):
        OperatorParams(alpha, rho)


@pytest.mark.parametrize("a, b", [(1.0, 1.0), (2.0, 1.0), (-0.1, 1.0), (0.0, math.inf)])
def test_interval_invariants(a, b):
    with pytest.raises(ValueError):
        Interval(a, b)


def test_alpha_message():
    with pytest.raises(ValueError, match=r"alpha must lie in \(0,1\)"):
        OperatorParams(1.2, 1.0)


# katu_integral


def test_integral_of_one():
    assert katu_integral(1.0, HALF, UNIT, 1.0) == pytest.approx(1.1283792, abs=1e-7)
    assert katu_integral(1.0, HALF, UNIT, 1.0) == pytest.approx(INV_GAMMA_15, rel=1e-14)


def test_integral_empty_range():
    assert katu_integral(T("exp(t)"), HALF, Interval(0.3, 1.0), 0.3) == 0.0


def test_integral_rho_two():
    assert katu_integral(1.0, OperatorParams(0.5, 2.0), UNIT, 1.0) == pytest.approx(0.7978846, abs=1e-7)


def test_integral_rejects_t_outside():
    with pytest.raises(ValueError):
        katu_integral(1.0, HALF, Interval(0.5, 1.0), 0.2)


def test_integral_propagates_flagged_nan():
    with pytest.warns(Warning):
        v = katu_integral(T("ln(t)"), HALF, UNIT, 1.0, GridResolution(16))
    assert math.isnan(v)


def test_affine_in_u_is_exact():
    p = OperatorParams(0.3, 1.7)
    iv = Interval(0.5, 1.2)
    # h(t) = t^rho is affine in u
    got = katu_integral(T("t^1.7"), p, iv, 1.2, GridResolution(3))
    ua, ut = 0.5**1.7, 1.2**1.7
    exact = p.rho**-p.alpha / gamma_fn(p.alpha) * (ut * (ut - ua) ** p.alpha / p.alpha - (ut - ua) ** (p.alpha + 1) / (p.alpha + 1))
    assert got == pytest.approx(exact, rel=1e-13)


# oracles


def test_power_integral_oracle_examples():
    assert power_integral_oracle(1.0, HALF, 0.0, 1.0) == pytest.approx(1.1283792, abs=1e-7)
    assert power_integral_oracle(2.0, HALF, 0.0, 0.0) == 0.0


def test_power_integral_oracle_brute_force():
    # direct quadrature of the definition in t, with the endpoint singularity handled by scipy's algebraic weight
    p, a, t, delta = OperatorParams(0.3, 1.7), 0.5, 1.2, 2.0
    al, r = p.alpha, p.rho

    def smooth(s):
        h = ((s**r - a**r) / r) ** (delta - 1)
        ratio = (t**r - s**r) / (r * (t - s)) if s < t else t ** (r - 1)
        return s ** (r - 1) * ratio ** (al - 1) * h

    val, _ = integrate.quad(smooth, a, t, weight="alg", wvar=(0, al - 1), epsabs=0, epsrel=1e-13)
    brute = val / gamma_fn(al)
    closed = gamma_fn(2) / gamma_fn(2.3) * ((1.2**1.7 - 0.5**1.7) / 1.7) ** 1.3
    assert power_integral_oracle(delta, p, a, t) == pytest.approx(closed, rel=1e-14)
    assert brute == pytest.approx(closed, rel=1e-11)
    assert katu_integral(T(f"((t^1.7 - {a**1.7!r})/1.7)"), p, Interval(a, 1.2), t, GridResolution(4096)) == pytest.approx(closed, rel=1e-12)


def test_power_ck_oracle_examples():
    assert power_ck_oracle(2.0, HALF, 0.0, 1.0) == pytest.approx(1.1283792, abs=1e-7)
    assert np.all(power_ck_oracle(1.0, HALF, 0.0, np.linspace(0.1, 1, 5)) == 0.0)
    p = OperatorParams(0.4, 2.0)
    assert power_ck_oracle(3.0, p, 0.0, 1.0) == pytest.approx(gamma_fn(3) / gamma_fn(2.6) * 0.5**1.6, rel=1e-14)


@pytest.mark.parametrize("delta", [0.5, 0.3, 0.1])
def test_power_ck_oracle_rejects_small_delta(delta):
    with pytest.raises(ValueError):
        power_ck_oracle(delta, HALF, 0.0, 1.0)


@pytest.mark.slow
def test_power_ck_cross_check_fine_grid():
    p = OperatorParams(0.4, 2.0)
    got = ck_derivative(T("(t^2/2)^2"), p, UNIT, 1.0, GridResolution(2**14))
    assert got == pytest.approx(power_ck_oracle(3.0, p, 0.0, 1.0), rel=1e-7)


@pytest.mark.parametrize("delta", [1.0, 1.5, 2.0, 3.0])
@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.9])
@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0])
def test_oracle_agreement(delta, alpha, rho):
    # graded mesh resolves the (u - u_a)^(delta-1) endpoint behavior
    p = OperatorParams(alpha, rho)
    h = T(f"(t^{rho!r}/{rho!r})^({delta!r} - 1)")
    got = katu_integral(h, p, UNIT, 1.0, GridResolution(4096, 2.0))
    exact = power_integral_oracle(delta, p, 0.0, 1.0)
    assert abs(got - exact) <= 1e-6 * exact


def test_rho_one_reduces_to_riemann_liouville():
    # classical RL integral of t^k is Gamma(k+1)/Gamma(k+1+alpha) t^(k+alpha)
    for k in (0, 1, 2):
        for t in (0.3, 1.0):
            classical = gamma_fn(k + 1) / gamma_fn(k + 1 + 0.5) * t ** (k + 0.5)
            assert power_integral_oracle(k + 1.0, HALF, 0.0, t) == pytest.approx(classical, rel=1e-15)


# gamma-derivative


def test_gamma_derivative_examples():
    assert gamma_derivative(T("t"), 1.0, 0.7) == 1.0
    assert gamma_derivative(T("t^2"), 2.0, 3.0) == pytest.approx(2.0, rel=1e-15)
    assert gamma_derivative(T("sin(t)"), 1.0, 0.0) == 1.0


def test_gamma_derivative_at_zero():
    # rho < 1: prefactor vanishes
    assert gamma_derivative(T("sin(t)"), 0.5, 0.0) == 0.0
    # rho > 1 with h'(0) = 0: limit of t^(1-rho) h'(t) for h = t^2, rho = 2 is 2
    assert gamma_derivative(T("t^2"), 2.0, 0.0) == pytest.approx(2.0, rel=1e-8)
    with pytest.raises(ValueError):
        gamma_derivative(T("sin(t)"), 2.0, 0.0)


def test_gamma_derivative_discrete_and_callable():
    p = OperatorParams(0.5, 2.0)
    g = build_grid(UNIT, p, GridResolution(400))
    h = DiscreteFunction(g, g.t_nodes**4)
    # t^(1-rho) d/dt t^4 = 4 t^2
    assert gamma_derivative(h, 2.0, 0.6) == pytest.approx(4 * 0.36, rel=1e-4)
    assert gamma_derivative(lambda t: t**4, 2.0, 0.6) == pytest.approx(4 * 0.36, rel=1e-8)


# CK and Katugampola derivatives


@pytest.mark.parametrize("c", [0.0, 1.0, -3.5, math.pi])
@pytest.mark.parametrize("p", [HALF, OperatorParams(0.2, 2.5), OperatorParams(0.9, 0.5)])
def test_ck_annihilates_constants(c, p):
    assert ck_derivative(Const(c), p, Interval(0.2, 1.5), 1.5) == 0.0
    g = build_grid(Interval(0.2, 1.5), p, GridResolution(64, 2.0))
    assert np.all(ck_derivative_nodes(DiscreteFunction(g, np.full(65, c)), p.alpha) == 0.0)


def test_ck_examples():
    assert ck_derivative(T("t^2"), HALF, UNIT, 1.0) == pytest.approx(1.5045055, abs=1e-7)
    assert ck_derivative(T("t - 1/2"), HALF, UNIT, 0.25) == pytest.approx(0.5641896, abs=1e-7)
    assert ck_derivative(T("t^2"), HALF, UNIT, 0.0) == 0.0


def test_katu_derivative_examples():
    assert katu_derivative(1.0, HALF, UNIT, 1.0) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-14)
    assert katu_derivative(T("t"), HALF, UNIT, 1.0) == pytest.approx(1.1283792, abs=1e-7)
    with pytest.raises(ValueError):
        katu_derivative(T("t"), HALF, UNIT, 0.0)


def test_katu_equals_ck_when_h_vanishes_at_a():
    p = OperatorParams(0.35, 1.4)
    iv = Interval(0.5, 2.0)
    h = T(f"sin(t^1.4 - {0.5**1.4!r})")
    for t in (0.7, 1.3, 2.0):
        assert katu_derivative(h, p, iv, t) == ck_derivative(h, p, iv, t)


# identities on node data


def _sampled(src, grid):
    return DiscreteFunction(grid, sample(T(src), grid.t_nodes))


@pytest.mark.parametrize("src", ["sin(t)", "t^2"])
@pytest.mark.parametrize("alpha, beta", [(0.3, 0.2), (0.3, 0.4), (0.5, 0.2), (0.5, 0.4)])
def test_semigroup(src, alpha, beta):
    g = build_grid(UNIT, OperatorParams(alpha, 1.0), GridResolution(2048))
    h = _sampled(src, g)
    lhs = integral_nodes(integral_nodes(h, beta), alpha).values
    rhs = integral_nodes(h, alpha + beta).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-5


@pytest.mark.parametrize("src", ["sin(t)", "t^2", "t*exp(t)"])
@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_inversion(src, alpha):
    # smooth h with h(a) = 0; see README for why h(a) != 0 is excluded
    g = build_grid(UNIT, OperatorParams(alpha, 1.0), GridResolution(4096))
    h = _sampled(src, g)
    back = ck_derivative_nodes(integral_nodes(h, alpha), alpha)
    assert np.max(np.abs(back - h.values)) <= 1e-4


def test_linearity():
    p = OperatorParams(0.45, 1.3)
    g = build_grid(Interval(0.1, 2.0), p, GridResolution(500, 1.5))
    h1, h2 = np.cos(g.t_nodes), g.t_nodes**3
    c1, c2 = 2.5, -0.75
    lhs = integral_nodes(DiscreteFunction(g, c1 * h1 + c2 * h2), p.alpha).values
    rhs = c1 * integral_nodes(DiscreteFunction(g, h1), p.alpha).values + c2 * integral_nodes(DiscreteFunction(g, h2), p.alpha).values
    assert np.allclose(lhs, rhs, rtol=1e-13, atol=1e-14)
