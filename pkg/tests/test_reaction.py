from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frontgate.reaction import (BISTABLE, MONOSTABLE, WolbachiaParams, change_of_variable,
                                constant_law, make_cubic, make_logistic, make_wolbachia_f,
                                make_wolbachia_h, potential, speed_sign_integral,
                                wolbachia_h0, wolbachia_theta0)

# reference values from tests/oracles/compute_oracles.py (bisection + scipy quad)
WOLB_THETA = 0.3499999999999997
WOLB_F1 = 0.03296072458152488
WOLB_THETA_C = 0.5526636020872937
WOLB_F_THETA = -0.006746902541367119

thetas = st.floats(0.05, 0.45)


def cubic_F(theta, x):
    return -x ** 4 / 4 + (1 + theta) * x ** 3 / 3 - theta * x ** 2 / 2


def test_cubic_closed_forms(cubic):
    assert cubic.kind == BISTABLE
    assert cubic.F1 == pytest.approx(1 / 24, abs=1e-15)
    assert cubic.theta_c == pytest.approx(0.39237, abs=1e-5)
    assert float(potential(cubic, 0.25)) == pytest.approx(-0.00227865, abs=1e-8)
    assert abs(cubic.F(cubic.theta_c)) < 1e-10
    assert potential(cubic, 0.0) == 0.0


def test_cubic_half_is_degenerate():
    m = make_cubic(0.5)
    assert m.degenerate
    assert m.theta_c is None
    with pytest.raises(ValueError):
        m.require_barrier_ready()


@pytest.mark.parametrize("theta", [0.0, 1.0, -0.1, 1.5])
def test_cubic_rejects_theta(theta):
    with pytest.raises(ValueError):
        make_cubic(theta)


@given(thetas)
def test_theta_c_is_root_of_quadratic(theta):
    m = make_cubic(theta)
    x = m.theta_c
    assert theta < x < 1
    assert abs(3 * x * x - 4 * (1 + theta) * x + 6 * theta) < 1e-12


@given(thetas)
def test_potential_derivative_is_f(theta):
    m = make_cubic(theta)
    x = np.linspace(0.01, 0.99, 99)
    h = 1e-5
    fd = (m.F(x + h) - m.F(x - h)) / (2 * h)
    assert np.abs(fd - m.f(x)).max() < 1e-9
    assert np.abs(m.F(x) - cubic_F(theta, x)).max() < 1e-15


@given(thetas)
def test_potential_sign_pattern(theta):
    m = make_cubic(theta)
    x = np.linspace(0.0, 1.0, 1001)[1:]
    Fx = m.F(x)
    assert np.all(Fx[x < m.theta_c - 1e-9] < 0)
    assert np.all(Fx[x > m.theta_c + 1e-9] > 0)


def test_extension_outside_unit_interval_is_negative(cubic, wolb):
    for m in (cubic, wolb):
        assert np.all(m.f(np.array([1.001, 1.5])) < 0)
        # below 0 the tail has slope |f'(0)|, so f(x) < 0 for x < 0
        assert np.all(m.f(np.array([-0.5, -1e-3])) < 0)


def test_wolbachia_defaults_match_oracle(wolb):
    assert wolb.kind == BISTABLE
    assert wolb.theta == pytest.approx(WOLB_THETA, abs=1e-13)
    assert wolb.F1 == pytest.approx(WOLB_F1, abs=1e-13)
    assert wolb.theta_c == pytest.approx(WOLB_THETA_C, abs=1e-12)
    assert wolb.F_theta == pytest.approx(WOLB_F_THETA, abs=1e-13)
    assert wolb.f(0.0) == 0.0
    assert abs(wolb.f(1.0)) < 1e-15


@given(st.floats(0.0, 0.5), st.floats(0.3, 1.0), st.floats(1.0, 2.0), st.floats(0.5, 3.0))
def test_wolbachia_vanishes_at_ends(sf, sh, delta, ds):
    try:
        p = WolbachiaParams(s_f=sf, s_h=sh, delta=delta, d_s=ds)
        m = make_wolbachia_f(p)
    except ValueError:
        return
    assert abs(m.f(0.0)) < 1e-14
    assert abs(m.f(1.0)) < 1e-12


def test_wolbachia_params_validation():
    with pytest.raises(ValueError):
        WolbachiaParams(s_f=0.5, s_h=0.1, delta=2.0)
    with pytest.raises(ValueError):
        WolbachiaParams(d_u=-1.0)
    with pytest.raises(ValueError):
        WolbachiaParams(eps=-0.1)


def test_wolbachia_h_properties():
    p = WolbachiaParams()
    law = make_wolbachia_h(p)
    assert float(law.dh(0.0)) < 0 < float(law.dh(1.0))
    x = np.linspace(0.0, 1.0, 2001)
    s = np.sign(law.dh(x))
    assert np.count_nonzero(s[1:] != s[:-1]) == 1
    assert float(law.dh(law.theta0)) == pytest.approx(0.0, abs=1e-14)
    flat = make_wolbachia_h(replace(p, eps=0.0))
    assert np.all(flat.h(x) == 1.0)
    assert wolbachia_theta0(replace(p, eps=0.0)) is None


def test_wolbachia_theta0_delta_one():
    p = WolbachiaParams(delta=1.0)
    assert wolbachia_theta0(p) == pytest.approx(0.5 + p.s_f / (2 * p.s_h), abs=1e-15)
    law = make_wolbachia_h(p)
    assert float(law.dh(wolbachia_theta0(p))) == pytest.approx(0.0, abs=1e-14)


def test_wolbachia_h_rejects_nonpositive():
    with pytest.raises(ValueError):
        make_wolbachia_h(WolbachiaParams(eps=2.0))


def test_wolbachia_h0_endpoints():
    p = WolbachiaParams(sigma_Fu=2.0, d_u=0.7)
    assert wolbachia_h0(p, 0.0) == pytest.approx(p.d_u / p.sigma_Fu, rel=1e-15)
    assert wolbachia_h0(p, 1.0) == pytest.approx(
        p.d_u * p.delta / (p.sigma_Fu * (1 - p.s_f)), rel=1e-15)
    # direct evaluation at p = 1/2 with the defaults
    q = WolbachiaParams()
    expect = 1.0 * (0.5 * 1.25 + 0.5) / (1.0 * (0.9 * 0.5 + 0.5 * (1 - 0.4)))
    assert wolbachia_h0(q, 0.5) == pytest.approx(expect, rel=1e-15)


def test_normalization_idempotent():
    law = make_wolbachia_h(WolbachiaParams())
    once = law.normalize()
    twice = once.normalize()
    assert once.h2_integral == pytest.approx(1.0, abs=1e-13)
    x = np.linspace(0, 1, 101)
    assert np.abs(once.h(x) - twice.h(x)).max() < 1e-14


def test_change_of_variable_identity(cubic):
    g, H, H_inv = change_of_variable(cubic, constant_law())
    x = np.linspace(0, 1, 201)
    assert np.abs(H(x) - x).max() < 1e-14
    assert np.abs(g.f(x) - cubic.f(x)).max() < 1e-13


@given(st.floats(0.02, 0.5))
def test_change_of_variable_invariants(eps):
    m = make_cubic(0.25)
    law = make_wolbachia_h(WolbachiaParams(eps=eps)).normalize()
    g, H, H_inv = change_of_variable(m, law)
    y = np.linspace(0, 1, 301)
    assert np.abs(H(H_inv(y)) - y).max() < 1e-10
    x = np.linspace(0, 1, 301)
    assert np.abs(g.f(H(x)) - m.f(x) * law.h(x) ** 2).max() < 1e-8
    assert np.all(np.diff(H(x)) > 0)
    assert g.kind == BISTABLE
    assert 0 < H(m.theta) < 1
    assert abs(g.f(H(m.theta))) < 1e-10
    # g'(0) = f'(0)
    assert float(g.df(0.0)) == pytest.approx(m.fprime0, abs=1e-7)


def test_change_of_variable_requires_normalized(cubic):
    with pytest.raises(ValueError):
        change_of_variable(cubic, make_wolbachia_h(WolbachiaParams()))


def test_speed_sign_integral_examples(cubic):
    assert speed_sign_integral(make_cubic(0.5), constant_law()) == pytest.approx(0.0, abs=1e-15)
    assert speed_sign_integral(cubic, constant_law()) == pytest.approx(1 / 24, abs=1e-14)
    wolb = make_wolbachia_f(WolbachiaParams())
    law = make_wolbachia_h(WolbachiaParams(eps=0.55))
    assert speed_sign_integral(wolb, law) < 0


def test_from_callable_classifies():
    m = make_logistic(1.0)
    assert m.kind == MONOSTABLE and m.theta is None
    from frontgate.reaction import ReactionModel
    b = ReactionModel.from_callable(lambda u: u * (1 - u) * (u - 0.3))
    assert b.kind == BISTABLE and b.theta == pytest.approx(0.3, abs=1e-12)
    with pytest.raises(ValueError):
        ReactionModel.from_callable(lambda u: u * (1 - u), kind=BISTABLE)
    with pytest.raises(ValueError):
        ReactionModel.from_callable(lambda u: 1 + 0 * u)


@given(thetas)
def test_reflection_swaps_mass(theta):
    m = make_cubic(theta)
    r = m.reflected()
    assert r.F1 == pytest.approx(-m.F1, abs=1e-13)
    assert r.theta == pytest.approx(1 - theta, abs=1e-10)
