import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from frontgate.errors import InfeasibleError
from frontgate.propagule import ScriptF, bubble_length, bubble_profile
from frontgate.reaction import WolbachiaParams, constant_law, make_cubic, make_wolbachia_h

# tests/oracles/compute_oracles.py: quad after the substitution p = alpha - s^2
L_08 = 4.570498482422358


@pytest.fixture(scope="module")
def law():
    return make_wolbachia_h(WolbachiaParams()).normalize()


def alg_weight_length(model, law, alpha):
    """L_alpha with the inverse square root at alpha handled by quad's algebraic weight."""
    def SF(x):
        return integrate.quad(lambda q: model.f(q) * law.h(q) ** 4, 0, x, epsabs=1e-14)[0]
    top = SF(alpha)

    def g(p):
        # (alpha - p)^(-1/2) is supplied by the weight
        gap = top - SF(p)
        return law.h(p) ** 2 * np.sqrt((alpha - p) / (2 * gap)) if alpha - p > 1e-14 else \
            law.h(p) ** 2 / np.sqrt(2 * model.f(alpha) * law.h(alpha) ** 4)
    return integrate.quad(g, 0, alpha, weight="alg", wvar=(0, -0.5), epsabs=1e-11)[0]


def test_length_regression(cubic):
    assert bubble_length(cubic, None, 0.8) == pytest.approx(L_08, abs=1e-10)
    assert bubble_length(cubic, constant_law(), 0.8) == pytest.approx(L_08, abs=1e-10)


def test_length_matches_weighted_quadrature(cubic, law):
    for lw in (constant_law(), law):
        for alpha in (0.5, 0.8, 0.95):
            assert bubble_length(cubic, lw, alpha) == pytest.approx(
                alg_weight_length(cubic, lw, alpha), rel=1e-7)


def test_length_diverges_at_theta_c(cubic):
    ds = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
    Ls = [bubble_length(cubic, None, cubic.theta_c + d) for d in ds]
    assert np.all(np.diff(Ls) > 0)
    # the growth is logarithmic: three times L_0.8 needs alpha within 1e-5 of theta_c
    assert Ls[3] > 3 * L_08


def test_rejects_alpha_below_threshold(cubic, law):
    with pytest.raises(InfeasibleError):
        bubble_length(cubic, None, 0.3)
    with pytest.raises(InfeasibleError):
        bubble_length(cubic, law, 0.395)  # above theta_c but below the weighted threshold
    with pytest.raises(ValueError):
        bubble_length(cubic, None, 1.0)


def test_script_f(cubic, law):
    SF = ScriptF(cubic, law)
    x = np.linspace(0.01, 0.99, 50)
    h = 1e-5
    fd = (SF(x + h) - SF(x - h)) / (2 * h)
    assert np.abs(fd - cubic.f(x) * law.h(x) ** 4).max() < 1e-9
    flat = ScriptF(cubic, constant_law())
    assert np.abs(flat(x) - cubic.F(x)).max() < 1e-14
    assert flat.theta_c == pytest.approx(cubic.theta_c, abs=1e-8)
    assert SF(SF.theta_c) == pytest.approx(0.0, abs=1e-14)
    assert SF.theta_c == pytest.approx(0.4002264720415833, abs=1e-10)


def test_script_f_infeasible():
    from frontgate.reaction import make_wolbachia_f
    wolb = make_wolbachia_f(WolbachiaParams())
    neg = make_wolbachia_h(WolbachiaParams(eps=0.55))
    with pytest.raises(InfeasibleError):
        ScriptF(wolb, neg).theta_c


@given(st.floats(0.0, 1.0))
def test_length_finite_on_admissible_range(u):
    m = make_cubic(0.25)
    lw = make_wolbachia_h(WolbachiaParams()).normalize()
    lo = ScriptF(m, lw).theta_c + 1e-3
    alpha = lo + u * (1 - 1e-3 - lo)
    L = bubble_length(m, lw, alpha)
    assert np.isfinite(L) and L > 0


@pytest.mark.parametrize("use_law", [False, True])
def test_profile_invariants(cubic, law, use_law, tmp_path):
    lw = law if use_law else None
    prop = bubble_profile(cubic, lw, 0.8)
    assert prop.v[0] == 0.8
    assert np.all(np.diff(prop.v) <= 0)
    assert prop.v.min() >= 0 and prop.v.max() <= 0.8
    assert abs(prop.zero_x - prop.L) < 1e-4 * prop.L
    assert prop.x[-1] == pytest.approx(prop.L, rel=1e-15)
    xs, vs = prop.full()
    assert np.array_equal(vs, vs[::-1])
    assert prop(np.array([prop.L + 0.1, -prop.L - 0.1])).tolist() == [0.0, 0.0]
    path = prop.to_csv(tmp_path / "p.csv")
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data[0, 0] == pytest.approx(-prop.L, rel=1e-15)
    assert data[-1, 0] == pytest.approx(prop.L, rel=1e-15)


def test_profile_matches_local_expansion(cubic):
    prop = bubble_profile(cubic, None, 0.8)
    x = prop.x[1:20]
    expect = 0.8 - 0.5 * cubic.f(0.8) * x ** 2
    assert np.abs(prop.v[1:20] - expect).max() < 1e-3 * x.max() ** 2
