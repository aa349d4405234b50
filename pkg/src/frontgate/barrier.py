"""Standing fronts blocked by a constant advection coefficient C on [-L, L].

A (C, L)-barrier solves -p'' - C p' = f(p) on (-L, L) and -p'' = f(p)
outside, with p -> 1 at -inf and p -> 0 at +inf. Outside the interval the
profile lies on an energy level: Y^2/2 + F(X) = F(1) on the left and = 0 on
the right. Inside, a double shooting in (alpha, beta) = (p(L), p(-L))
determines C = gamma(alpha, beta) and L = lambda(alpha, beta).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import _kernels as K
from .errors import InfeasibleError, NumericalError
from .io import write_csv
from .phaseplane import (W_STEP, PhasePoint, gamma_B_point, orbit_exit, w_from_one,
                         w_from_zero)
from .reaction import ReactionModel, quad

BETA_MARGIN = 1e-4
SCAN_POINTS = 64
TAIL_CUT = 1e-4
FLIGHT_T_MAX = 2000.0


@dataclass(frozen=True)
class ShootingPair:
    alpha: float
    beta: float
    C: float
    L: float


@dataclass(frozen=True, eq=False)
class BarrierSolution:
    pair: ShootingPair
    x: np.ndarray
    p: np.ndarray
    dp: np.ndarray
    kind: str
    inner_residual: float
    outer_residual: float
    energy_defect: float

    def __call__(self, x):
        """Profile at arbitrary positions, held at the truncation values outside."""
        return np.interp(x, self.x, self.p)

    def to_csv(self, path):
        return write_csv(path, ["x", "p"], [self.x, self.p])


class BarrierList(list):
    """List of barriers that also records why it may be empty."""

    def __init__(self, items=(), reason: str | None = None):
        super().__init__(items)
        self.reason = reason


@dataclass(frozen=True, eq=False)
class LStarCurve:
    C_values: np.ndarray
    L_star_values: np.ndarray
    minimizer_beta: np.ndarray
    minimizer_alpha: np.ndarray

    @property
    def scaled(self) -> np.ndarray:
        return 4.0 * self.C_values * self.L_star_values

    def to_csv(self, path):
        return write_csv(path, ["C", "L_star", "4CL_star", "beta_star", "alpha_star"],
                         [self.C_values, self.L_star_values, self.scaled,
                          self.minimizer_beta, self.minimizer_alpha])


# shooting in (alpha, beta) ---------------------------------------------------

def _w_step(alpha, beta):
    return min(W_STEP, (beta - alpha) / 2000.0)


def _check_pair(model: ReactionModel, alpha: float, beta: float):
    model.require_barrier_ready()
    if not 0.0 < alpha < model.theta_c:
        raise ValueError("alpha must lie in (0, theta_c)")
    if not alpha < beta < 1.0:
        raise ValueError("beta must lie in (alpha, 1)")


def _w_at(model, C, alpha, beta, target):
    cf, cF, s0, s1, F1 = model.kernel_data
    use = target is not None
    code, p, w, lam, _, _, _ = K.w_profile(cf, cF, s0, s1, F1, float(C), float(alpha),
                                          -float(model.F(alpha)),
                                          float(beta), _w_step(alpha, beta),
                                          float(target) if use else 0.0, use, False, 0.0, 0.0)
    return code, w, lam


def _too_large(model, C, alpha, beta) -> bool:
    code, w, _ = _w_at(model, C, alpha, beta, model.F1)
    if code == K.W_TRUNCATED:
        return False
    return code == K.W_HIT_TARGET or w >= model.F1


def gamma(model: ReactionModel, alpha: float, beta: float, tol: float = 1e-11,
          max_iter: int = 200) -> float:
    """The coefficient C for which w(alpha) = 0 reaches w(beta) = F(1)."""
    _check_pair(model, alpha, beta)
    lo = model.c_star
    hi = 2.0 * lo
    while _too_large(model, lo, alpha, beta):
        hi = lo
        lo *= 0.5
        if lo < 1e-12:
            raise NumericalError("no lower bracket for gamma")
    for _ in range(80):
        if _too_large(model, hi, alpha, beta):
            break
        lo = hi
        hi *= 2.0
    else:
        raise NumericalError("no upper bracket for gamma")
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, hi):
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        if _too_large(model, mid, alpha, beta):
            hi = mid
        else:
            lo = mid
    raise NumericalError("gamma bisection did not converge")


def lambda_(model: ReactionModel, alpha: float, beta: float, tol: float = 1e-11) -> float:
    """Half-length 1/2 int_alpha^beta dp / sqrt(2(w - F)) at C = gamma(alpha, beta)."""
    return shoot(model, alpha, beta, tol).L


def shoot(model: ReactionModel, alpha: float, beta: float, tol: float = 1e-11) -> ShootingPair:
    C = gamma(model, alpha, beta, tol)
    code, _, lam = _w_at(model, C, alpha, beta, None)
    if code != K.W_REACHED_END:
        # the converged C sits on the truncation edge; use the upper bracket side
        code, _, lam = _w_at(model, C * (1 + tol), alpha, beta, None)
        if code != K.W_REACHED_END:
            raise NumericalError("w profile truncated at the converged coefficient")
    return ShootingPair(alpha=float(alpha), beta=float(beta), C=float(C), L=float(lam))


# fixed C: orbits from Gamma_B ----------------------------------------------

def _orbit_dt(model: ReactionModel, C: float) -> float:
    return min(1e-3, 1e-2 / max(C, 1e-12), 1e-2 / model.max_abs_df)


def _flight(model: ReactionModel, C: float, beta: float, t_max: float = FLIGHT_T_MAX):
    """(L, alpha) for the orbit from Gamma_B at beta; L = inf if Gamma_A is missed."""
    start = gamma_B_point(model, beta)
    code, t, end = orbit_exit(model, C, start, t_max, _orbit_dt(model, C))
    if code != "hit_gamma_A":
        return np.inf, np.nan
    return 0.5 * t, end.X


def _require_speed_margin(model: ReactionModel, C: float):
    model.require_barrier_ready()
    if C <= model.c_star * (1 + 1e-9):
        raise InfeasibleError(f"C={C:g} must exceed the wave speed c_*={model.c_star:.6g}")


def alpha_plus(model: ReactionModel, C: float, beta: float) -> float:
    """Exit frequency on Gamma_A of the orbit started on Gamma_B at beta."""
    _require_speed_margin(model, C)
    L, alpha = _flight(model, C, beta)
    if not np.isfinite(L):
        raise InfeasibleError(f"orbit from beta={beta:g} misses Gamma_A (beta <= beta_C?)")
    return float(alpha)


def L_profile(model: ReactionModel, C: float, beta: float) -> float:
    """Half flight time from Gamma_B at beta to Gamma_A."""
    _require_speed_margin(model, C)
    L, _ = _flight(model, C, beta)
    if not np.isfinite(L):
        raise InfeasibleError(f"orbit from beta={beta:g} misses Gamma_A (beta <= beta_C?)")
    return float(L)


def limit_endpoints(model: ReactionModel, C: float, tol: float = 1e-12) -> tuple[float, float]:
    """(alpha_C, beta_C): ends of the half-infinite problems at fixed C."""
    _require_speed_margin(model, C)
    code, beta_C, _, _ = w_from_zero(model, C, 1.0, target=model.F1)
    if code != "hit_target":
        raise NumericalError("w from p=0 never reached F(1)")
    code, alpha_C, _ = w_from_one(model, C, 0.0, target=0.0)
    if code != "hit_target":
        raise NumericalError("w from p=1 never reached 0")
    return float(alpha_C), float(beta_C)


def L_star(model: ReactionModel, C: float, tol: float = 1e-10) -> tuple[float, float, float]:
    """(L_*(C), beta_0, alpha_0): the minimum of L_profile over (beta_C, 1)."""
    _require_speed_margin(model, C)
    _, beta_C = limit_endpoints(model, C)
    a, b = beta_C + BETA_MARGIN, 1.0 - BETA_MARGIN
    if a >= b:
        raise NumericalError("empty beta interval")
    betas = np.linspace(a, b, SCAN_POINTS)
    # orbits far slower than the best one so far cannot hold the minimum; cut them short
    Ls = np.empty(SCAN_POINTS)
    best = np.inf
    for i, bb in enumerate(betas):
        Ls[i] = _flight(model, C, bb, min(FLIGHT_T_MAX, 8.0 * best))[0]
        best = min(best, Ls[i])
    if not np.any(np.isfinite(Ls)):
        raise NumericalError("no finite half-length in the beta scan")
    k = int(np.argmin(Ls))
    if 0 < k < SCAN_POINTS - 1:
        res = optimize.minimize_scalar(lambda bb: _flight(model, C, bb)[0], method="golden",
                                       bracket=(betas[k - 1], betas[k], betas[k + 1]),
                                       tol=max(tol, 1e-9))
        beta0 = float(res.x)
    else:
        beta0 = float(betas[k])
    L0, alpha0 = _flight(model, C, beta0)
    if L0 > Ls[k]:
        beta0 = float(betas[k])
        L0, alpha0 = _flight(model, C, beta0)
    return float(L0), beta0, float(alpha0)


def alpha_beta_star(model: ReactionModel, C: float) -> tuple[float, float]:
    _, beta0, alpha0 = L_star(model, C)
    return alpha0, beta0


def _scaled_limit(model: ReactionModel) -> float:
    return float(np.log(1.0 - model.F1 / model.F_theta))


def C_star(model: ReactionModel, L: float, tol: float = 1e-10) -> float:
    """Smallest C admitting a (C, L)-barrier, the inverse of L_star."""
    model.require_barrier_ready()
    if L <= 0:
        raise ValueError("L must be positive")
    c0 = model.c_star

    def gap(C):
        return L_star(model, C)[0] - L

    hi = max(2.0 * c0, 1.5 * _scaled_limit(model) / (4.0 * L))
    for _ in range(60):
        if gap(hi) < 0:
            break
        hi *= 2.0
    else:
        raise NumericalError("no upper bracket for C_star")
    lo = 0.5 * (c0 + hi)
    for _ in range(60):
        try:
            if gap(lo) > 0:
                break
        except NumericalError:
            pass
        hi_candidate = lo
        lo = c0 + 0.5 * (lo - c0)
        if gap(hi_candidate) < 0:
            hi = hi_candidate
    else:
        raise NumericalError("no lower bracket for C_star")
    return float(optimize.brentq(gap, lo, hi, xtol=tol * max(1.0, hi), rtol=1e-14))


def lstar_curve(model: ReactionModel, C_values, threads: int = 1) -> LStarCurve:
    """L_* and its minimizers over a list of C, evaluated concurrently."""
    C_values = np.asarray(C_values, dtype=float)
    for C in C_values:
        _require_speed_margin(model, C)
    model.c_star, model.kernel_data, model.max_abs_df  # warm shared caches first
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda C: L_star(model, C), C_values))
    else:
        rows = [L_star(model, C) for C in C_values]
    rows = np.array(rows).reshape(-1, 3)
    return LStarCurve(C_values=C_values, L_star_values=rows[:, 0],
                      minimizer_beta=rows[:, 1], minimizer_alpha=rows[:, 2])


# barrier profiles ------------------------------------------------------------

def enumerate_barriers(model: ReactionModel, C: float, L: float, tol: float = 1e-11,
                       dx: float = 1e-3) -> BarrierList:
    """All (C, L)-barriers found by root finding on each side of the L_profile minimum.

    Returned in increasing order of beta; the first is labelled minimal and
    the last maximal.
    """
    Ls, beta0, _ = L_star(model, C)
    if L < Ls * (1 - 1e-9):
        return BarrierList(reason="no_barrier")
    _, beta_C = limit_endpoints(model, C)
    if L <= Ls * (1 + 1e-9):
        betas = [beta0]
    else:
        betas = []
        for end in (beta_C, 1.0):
            root = _side_root(model, C, L, beta0, end, tol)
            if root is not None:
                betas.append(root)
        betas.sort()
    out = BarrierList()
    for i, beta in enumerate(betas):
        if len(betas) == 1:
            kind = "minimal"
        else:
            kind = "minimal" if i == 0 else ("maximal" if i == len(betas) - 1 else "other")
        out.append(reconstruct(model, C, beta, kind, dx))
    if not out:
        out.reason = "no_barrier"
    return out


def _side_root(model, C, L, beta0, end, tol):
    def gap(b):
        return _flight(model, C, b)[0] - L

    margin = BETA_MARGIN
    while margin > 1e-13:
        b = end + margin if end < beta0 else end - margin
        if (b - beta0) * (end - beta0) > 0 and gap(b) > 0:
            lo, hi = sorted((b, beta0))
            return float(optimize.brentq(gap, lo, hi, xtol=tol, rtol=1e-14))
        margin *= 0.1
    return None


def reconstruct(model: ReactionModel, C: float, beta: float, kind: str = "other",
                dx: float = 1e-3) -> BarrierSolution:
    """Sample the barrier through Gamma_B at beta on a uniform grid."""
    L, alpha = _flight(model, C, beta)
    if not np.isfinite(L):
        raise InfeasibleError("orbit misses Gamma_A")
    cf, cF, s0, s1, F1 = model.kernel_data
    n_in = max(int(np.ceil(2.0 * L / dx)), 16)
    h = 2.0 * L / n_in
    start = gamma_B_point(model, beta)
    xs_in, ys_in = K.orbit_fixed(cf, s0, s1, float(C), start.X, start.Y, h, n_in)
    n_max = 10_000_000
    lp, ld = K.energy_tail(cF, s0, s1, F1, F1, float(beta), -h, 1.0 - TAIL_CUT, n_max)
    rp, rd = K.energy_tail(cF, s0, s1, F1, 0.0, float(xs_in[-1]), h, TAIL_CUT, n_max)
    p = np.concatenate([lp[:0:-1], xs_in, rp[1:]])
    dp = np.concatenate([ld[:0:-1], ys_in, rd[1:]])
    n_left = lp.size - 1
    x = -L + h * (np.arange(p.size) - n_left)
    inner_res, outer_res = _residuals(model, C, p, h, n_left, n_in)
    e_left = 0.5 * start.Y ** 2 + float(model.F(beta)) - F1
    e_right = 0.5 * ys_in[-1] ** 2 + float(model.F(xs_in[-1]))
    pair = ShootingPair(alpha=float(xs_in[-1]), beta=float(beta), C=float(C), L=float(L))
    return BarrierSolution(pair=pair, x=x, p=p, dp=dp, kind=kind,
                           inner_residual=inner_res, outer_residual=outer_res,
                           energy_defect=float(max(abs(e_left), abs(e_right))))


def _residuals(model, C, p, h, n_left, n_in):
    d2 = (p[2:] - 2.0 * p[1:-1] + p[:-2]) / (h * h)
    d1 = (p[2:] - p[:-2]) / (2.0 * h)
    mid = p[1:-1]
    idx = np.arange(1, p.size - 1)
    inner = (idx > n_left) & (idx < n_left + n_in)
    outer = (idx < n_left) | (idx > n_left + n_in)
    fv = model.f(mid)
    r_in = -d2 - C * d1 - fv
    r_out = -d2 - fv
    inner_res = float(np.abs(r_in[inner]).max()) if inner.any() else 0.0
    outer_res = float(np.abs(r_out[outer]).max()) if outer.any() else 0.0
    return inner_res, outer_res


def tail_extents(model: ReactionModel, alpha: float, beta: float) -> tuple[float, float]:
    """Lengths of the truncated outer tails, by quadrature of dx = dp / |p'|."""
    F1 = model.F1
    left = quad(lambda q: 1.0 / np.sqrt(2.0 * (F1 - float(model.F(q)))), beta, 1.0 - TAIL_CUT)
    right = quad(lambda q: 1.0 / np.sqrt(-2.0 * float(model.F(q))), TAIL_CUT, alpha)
    return left, right


# closed forms ----------------------------------------------------------------

def critical_jump(model: ReactionModel) -> float:
    """Smallest ratio N_R / N_L of a population step that blocks the wave."""
    model.require_barrier_ready()
    return float((1.0 - model.F1 / model.F_theta) ** 0.25)


def local_barrier_exponent(model: ReactionModel, alpha0: float) -> float:
    """K(alpha_0) = log(1 - F(1)/F(alpha_0)) / 4, defined where F(alpha_0) < 0."""
    model.require_barrier_ready()
    Fa = float(model.F(alpha0))
    if Fa >= 0:
        raise InfeasibleError("F(alpha_0) must be negative")
    return float(0.25 * np.log(1.0 - model.F1 / Fa))


__all__ = [
    "ShootingPair", "BarrierSolution", "BarrierList", "LStarCurve", "PhasePoint",
    "gamma", "lambda_", "shoot", "alpha_plus", "L_profile", "L_star", "C_star",
    "limit_endpoints", "enumerate_barriers", "reconstruct", "tail_extents",
    "critical_jump", "local_barrier_exponent", "alpha_beta_star", "lstar_curve",
]
