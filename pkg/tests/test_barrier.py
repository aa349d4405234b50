import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frontgate import barrier as B
from frontgate.errors import InfeasibleError
from frontgate.reaction import make_cubic

# tests/oracles/compute_oracles.py: DOP853 + brentq / quad / minimize_scalar on the exact cubic
GAMMA_02_06 = 0.6221062013416562
LAMBDA_02_06 = 1.3443206561271424
ALPHA_PLUS_C1_B09 = 0.3651198806902514
LSTAR_C1 = 0.7645357947698819
LSTAR_C2 = 0.37272112469006113
ALPHA_C1, BETA_C1 = 0.3651571288477475, 0.27198554421677296
LIMIT = np.log(1 + (1 / 24) / 0.0022786458333333335)

ALPHAS = [0.05, 0.1, 0.15, 0.2, 0.25]
BETAS = [0.45, 0.55, 0.65, 0.75, 0.85]


def F(x, theta=0.25):
    return -x ** 4 / 4 + (1 + theta) * x ** 3 / 3 - theta * x ** 2 / 2


@pytest.fixture(scope="module")
def grid(cubic):
    G = np.array([[B.gamma(cubic, a, b) for b in BETAS] for a in ALPHAS])
    L = np.array([[B.lambda_(cubic, a, b) for b in BETAS] for a in ALPHAS])
    return G, L


def test_gamma_lambda_regression(cubic):
    assert B.gamma(cubic, 0.2, 0.6) == pytest.approx(GAMMA_02_06, abs=1e-9)
    assert B.lambda_(cubic, 0.2, 0.6) == pytest.approx(LAMBDA_02_06, abs=1e-9)
    pair = B.shoot(cubic, 0.2, 0.6)
    assert (pair.C, pair.L) == pytest.approx((GAMMA_02_06, LAMBDA_02_06), abs=1e-9)


def test_gamma_blows_up_as_beta_meets_alpha(cubic):
    g_far = B.gamma(cubic, 0.2, 0.6)
    g_near = B.gamma(cubic, 0.2, 0.21)
    g_nearer = B.gamma(cubic, 0.2, 0.201)
    assert g_far < g_near < g_nearer
    assert g_nearer > 10 * g_far


def test_gamma_exceeds_wave_speed(grid, cubic):
    G, _ = grid
    assert np.all(G > cubic.c_star)


def test_monotonicity_on_grid(grid):
    G, L = grid
    assert np.all(np.diff(G, axis=0) > 0)   # increasing in alpha
    assert np.all(np.diff(G, axis=1) < 0)   # decreasing in beta
    assert np.all(np.diff(L, axis=1) > 0)   # lambda increasing in beta


def test_lambda_c_lower_bound(grid, cubic):
    G, L = grid
    bound = 1 - np.sqrt(-cubic.F_theta / (cubic.F1 - cubic.F_theta))
    assert np.all(2 * L * G >= bound)


def test_lambda_c_limit(cubic):
    beta = 0.3
    alpha = beta - 1e-3
    val = 2 * B.lambda_(cubic, alpha, beta) * B.gamma(cubic, alpha, beta)
    target = 0.5 * np.log(1 - cubic.F1 / F(beta))
    assert abs(val - target) / target < 0.02


def test_lambda_vanishes_with_gap(cubic):
    for gap in (1e-2, 1e-3):
        a, b = 0.2, 0.2 + gap
        assert 2 * B.lambda_(cubic, a, b) <= gap / np.sqrt(-F(a)) * (1 + 1e-9)


def test_alpha_plus_regression_and_limits(cubic):
    assert B.alpha_plus(cubic, 1.0, 0.9) == pytest.approx(ALPHA_PLUS_C1_B09, abs=1e-10)
    a_C, b_C = B.limit_endpoints(cubic, 1.0)
    assert (a_C, b_C) == pytest.approx((ALPHA_C1, BETA_C1), abs=1e-9)
    assert B.alpha_plus(cubic, 1.0, 1 - 1e-6) == pytest.approx(a_C, abs=1e-5)
    assert B.alpha_plus(cubic, 1.0, b_C + 1e-6) < 1e-3


def test_limit_endpoints_trends(cubic):
    near = B.limit_endpoints(cubic, cubic.c_star + 1e-3)
    assert near[0] < 0.05 and near[1] > 0.9
    # alpha_C increases to theta_c and beta_C decreases to 0 as C grows
    ends = [B.limit_endpoints(cubic, C) for C in (0.5, 1.0, 2.0, 4.0, 50.0)]
    a = [e[0] for e in ends]
    b = [e[1] for e in ends]
    assert np.all(np.diff(a) > 0) and np.all(np.diff(b) < 0)
    assert a[-1] == pytest.approx(cubic.theta_c, abs=1e-3)
    assert b[-1] < 0.01


def test_l_profile_shape(cubic):
    Ls, beta0, alpha0 = B.L_star(cubic, 1.0)
    assert B.L_profile(cubic, 1.0, beta0) == pytest.approx(Ls, abs=1e-12)
    _, b_C = B.limit_endpoints(cubic, 1.0)
    # both ends diverge only logarithmically in the distance to the endpoint
    near_C = [B.L_profile(cubic, 1.0, b_C + d) for d in (1e-3, 1e-6, 1e-9, 1e-12)]
    near_1 = [B.L_profile(cubic, 1.0, 1 - d) for d in (1e-3, 1e-6, 1e-9, 1e-12)]
    assert np.all(np.diff(near_C) > 0) and np.all(np.diff(near_1) > 0)
    assert near_C[-1] > 10 * Ls and near_1[-1] > 10 * Ls
    betas = np.linspace(b_C + 0.01, 0.99, 40)
    prof = np.array([B.L_profile(cubic, 1.0, b) for b in betas])
    i = int(np.argmin(prof))
    assert np.all(np.diff(prof[:i + 1]) < 0) and np.all(np.diff(prof[i:]) > 0)


def test_l_star_regression(cubic):
    assert B.L_star(cubic, 1.0)[0] == pytest.approx(LSTAR_C1, abs=1e-10)
    assert B.L_star(cubic, 2.0)[0] == pytest.approx(LSTAR_C2, abs=1e-10)


def test_l_star_needs_speed_margin(cubic):
    with pytest.raises(InfeasibleError):
        B.L_star(cubic, 0.3)


def test_alpha_beta_star_bracket_theta(cubic):
    for C in (0.5, 1.0, 3.0, 10.0):
        a, b = B.alpha_beta_star(cubic, C)
        assert a < cubic.theta < b


def test_round_trips(cubic):
    Ls = B.L_star(cubic, 2.0)[0]
    assert B.C_star(cubic, Ls) == pytest.approx(2.0, rel=1e-4)
    C = B.C_star(cubic, 1.0)
    assert B.L_star(cubic, C)[0] == pytest.approx(1.0, rel=1e-4)


def test_c_star_limits(cubic):
    small = B.C_star(cubic, 0.02)
    assert abs(4 * 0.02 * small - LIMIT) / LIMIT < 0.01
    Cs = [B.C_star(cubic, L) for L in (2.0, 4.0, 8.0)]
    assert np.all(np.diff(Cs) < 0)
    assert np.all(np.array(Cs) > cubic.c_star)
    assert Cs[-1] - cubic.c_star < 0.1


def test_enumerate_below_at_and_above(cubic):
    Ls = B.L_star(cubic, 1.0)[0]
    none = B.enumerate_barriers(cubic, 1.0, 0.5 * Ls)
    assert len(none) == 0 and none.reason == "no_barrier"
    one = B.enumerate_barriers(cubic, 1.0, Ls)
    assert len(one) == 1
    two = B.enumerate_barriers(cubic, 1.0, 1.5 * Ls)
    assert [s.kind for s in two] == ["minimal", "maximal"]
    lo, hi = two
    x = np.linspace(-10, 10, 2001)
    assert np.all(lo(x) < hi(x))


@pytest.mark.parametrize("factor", [1.0, 1.5, 3.0])
def test_barrier_solution_invariants(cubic, factor):
    Ls = B.L_star(cubic, 1.0)[0]
    for sol in B.enumerate_barriers(cubic, 1.0, factor * Ls):
        assert np.all(np.diff(sol.p) < 0)
        assert sol.inner_residual < 1e-6
        assert sol.outer_residual < 1e-6
        assert sol.energy_defect < 1e-8
        assert sol.pair.L == pytest.approx(factor * Ls, rel=1e-8)
        assert 0 < sol.pair.alpha < cubic.theta_c and sol.pair.alpha < sol.pair.beta < 1
        assert sol.p[0] == pytest.approx(1 - B.TAIL_CUT, abs=1e-6)
        assert sol.p[-1] == pytest.approx(B.TAIL_CUT, abs=1e-6)
        assert B.gamma(cubic, sol.pair.alpha, sol.pair.beta) == pytest.approx(1.0, abs=1e-7)


def test_tail_extents_match_samples(cubic):
    sol = B.enumerate_barriers(cubic, 1.0, 1.0)[0]
    left, right = B.tail_extents(cubic, sol.pair.alpha, sol.pair.beta)
    assert -sol.pair.L - sol.x[0] == pytest.approx(left, rel=1e-3)
    assert sol.x[-1] - sol.pair.L == pytest.approx(right, rel=1e-3)


@given(st.floats(0.6, 3.0), st.floats(1.0, 2.0))
def test_barrier_set_is_upward_closed(C, factor):
    m = make_cubic(0.25)
    L = factor * B.L_star(m, C)[0]
    assert B.enumerate_barriers(m, C, L)
    assert B.enumerate_barriers(m, C + 0.1, L)
    assert B.enumerate_barriers(m, C, L + 0.1)


def test_critical_jump(cubic, wolb):
    assert B.critical_jump(cubic) == pytest.approx((1 + (1 / 24) / 0.0022786458333333) ** 0.25,
                                                   abs=1e-6)
    assert B.critical_jump(cubic) == pytest.approx(2.0956, abs=1e-4)
    assert B.critical_jump(make_cubic(0.4999)) < 1.01
    # oracle values of F(1), F(theta) for the default Wolbachia reaction
    assert B.critical_jump(wolb) == pytest.approx(
        (1 - 0.03296072458152488 / -0.006746902541367119) ** 0.25, abs=1e-12)


def test_local_barrier_exponent(cubic):
    assert B.local_barrier_exponent(cubic, cubic.theta) == pytest.approx(
        np.log(B.critical_jump(cubic)), abs=1e-14)
    assert B.local_barrier_exponent(cubic, 0.3) == pytest.approx(
        0.25 * np.log(1 - (1 / 24) / F(0.3)), abs=1e-13)
    assert B.local_barrier_exponent(cubic, cubic.theta_c - 1e-6) > 3
    ks = [B.local_barrier_exponent(cubic, a) for a in np.linspace(0.05, 0.38, 34)]
    assert min(ks) >= B.local_barrier_exponent(cubic, cubic.theta) - 1e-14
    with pytest.raises(InfeasibleError):
        B.local_barrier_exponent(cubic, 0.5)


def test_lstar_curve_threads_agree(cubic, tmp_path):
    Cs = np.linspace(0.5, 3.0, 6)
    one = B.lstar_curve(cubic, Cs, threads=1)
    many = B.lstar_curve(cubic, Cs, threads=3)
    assert np.array_equal(one.L_star_values, many.L_star_values)
    assert np.all(np.diff(one.L_star_values) < 0)
    assert np.all(one.minimizer_alpha < 0.25) and np.all(one.minimizer_beta > 0.25)
    path = one.to_csv(tmp_path / "c.csv")
    assert path.read_text().splitlines()[0] == "C,L_star,4CL_star,beta_star,alpha_star"


def test_wolbachia_lstar_regressions(wolb):
    frozen = {0.35: 1.5609488537715517, 0.4: 1.2819339672880323,
              1.0: 0.45153379612043537, 2.0: 0.2225636864425616}
    for C, L in frozen.items():
        assert B.L_star(wolb, C)[0] == pytest.approx(L, abs=1e-9)
