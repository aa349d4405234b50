"""Planar system X' = Y, Y' = -C Y - f(X), its energy, and the w-equation.

The energy E = Y^2/2 + F(X) decays along orbits when C > 0. Barrier tails
live on the level sets Gamma_A = {E = 0} and Gamma_B = {E = F(1)}.
Parametrizing an orbit by X and writing w(X) = E gives
dw/dp = C sqrt(2 (w - F(p))), the form used for shooting.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .io import write_csv
from .reaction import ReactionModel

EXIT_NAMES = {
    K.HIT_GAMMA_A: "hit_gamma_A",
    K.LEFT_UNIT_BOX: "left_unit_box",
    K.TURNED_BACK: "turned_back",
    K.MAX_TIME: "max_time",
}
W_EXIT_NAMES = {
    K.W_REACHED_END: "reached_end",
    K.W_HIT_TARGET: "hit_target",
    K.W_TRUNCATED: "truncated",
}

ORBIT_DT = 1e-3
W_STEP = 1e-4
SINGULAR_OFFSET = 1e-6
SINGULAR_GRADE = 0.05


@dataclass(frozen=True)
class PhasePoint:
    X: float
    Y: float


@dataclass(frozen=True, eq=False)
class Orbit:
    C: float
    t: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    exit: str

    @property
    def end(self) -> PhasePoint:
        return PhasePoint(float(self.X[-1]), float(self.Y[-1]))

    @property
    def duration(self) -> float:
        return float(self.t[-1])

    def to_csv(self, path):
        return write_csv(path, ["t_or_p", "X_or_w", "Y"], [self.t, self.X, self.Y])


@dataclass(frozen=True, eq=False)
class WProfile:
    alpha: float
    C: float
    p: np.ndarray
    w: np.ndarray
    lam: np.ndarray
    exit: str

    @property
    def truncated(self) -> bool:
        return self.exit == "truncated"

    def __call__(self, p):
        return np.interp(p, self.p, self.w) if self.p[-1] >= self.p[0] else \
            np.interp(p, self.p[::-1], self.w[::-1])

    def to_csv(self, path):
        return write_csv(path, ["t_or_p", "X_or_w", "Y"],
                         [self.p, self.w, np.full_like(self.p, np.nan)])


def energy(model: ReactionModel, pt: PhasePoint) -> float:
    return 0.5 * pt.Y * pt.Y + float(model.F(pt.X))


def gamma_B_point(model: ReactionModel, beta: float) -> PhasePoint:
    """The point of {E = F(1), Y <= 0} above X = beta."""
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    gap = _gap_to_one(model, beta)
    if gap < -1e-14:
        raise ValueError("F(beta) exceeds F(1)")
    return PhasePoint(float(beta), -float(np.sqrt(max(2.0 * gap, 0.0))))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _gap_to_one(model: ReactionModel, beta: float) -> float:
    """F(1) - F(beta), integrated directly near 1 where the difference cancels."""
    if 1.0 - beta > 1e-3:
        return model.F1 - float(model.F(beta))
    half = 0.5 * (1.0 - beta)
    x = beta + half * (_GL_NODES + 1.0)
    return half * float(np.dot(_GL_WEIGHTS, model.f(x)))


def check_step(model: ReactionModel, dt: float) -> None:
    if dt > 1e-2 / model.max_abs_df:
        raise ValueError(f"step {dt:g} exceeds 1e-2 / max|f'| = {1e-2 / model.max_abs_df:g}")


def integrate_orbit(model: ReactionModel, C: float, start: PhasePoint, t_max: float,
                    dt: float = ORBIT_DT) -> Orbit:
    """Fixed-step RK4 orbit, stopped at the first exit event (refined by bisection)."""
    if C < 0:
        raise ValueError("C must be non-negative")
    check_step(model, dt)
    cf, cF, s0, s1, F1 = model.kernel_data
    code, _, _, _, ts, xs, ys = K.orbit(cf, cF, s0, s1, F1, float(C), float(start.X),
                                        float(start.Y), float(dt), float(t_max), True)
    return Orbit(C=float(C), t=ts.copy(), X=xs.copy(), Y=ys.copy(), exit=EXIT_NAMES[code])


def orbit_exit(model: ReactionModel, C: float, start: PhasePoint, t_max: float,
               dt: float = ORBIT_DT) -> tuple[str, float, PhasePoint]:
    """Like :func:`integrate_orbit` but only returns (exit, time, end point)."""
    cf, cF, s0, s1, F1 = model.kernel_data
    code, t, x, y, _, _, _ = K.orbit(cf, cF, s0, s1, F1, float(C), float(start.X),
                                     float(start.Y), float(dt), float(t_max), False)
    return EXIT_NAMES[code], t, PhasePoint(x, y)


def solve_w(model: ReactionModel, C: float, alpha: float, p_end: float,
            step: float = W_STEP) -> WProfile:
    """Integrate w' = C sqrt(2(w - F)) from w(alpha) = 0 up to p_end."""
    theta_c = model.theta_c
    if theta_c is None:
        raise ValueError("solve_w needs a bistable model with F(1) > 0")
    if not 0.0 < alpha < theta_c:
        raise ValueError("alpha must lie in (0, theta_c)")
    if not alpha < p_end <= 1.0:
        raise ValueError("p_end must lie in (alpha, 1]")
    return _w_run(model, C, alpha, -float(model.F(alpha)), p_end, step, None, alpha)


def _w_run(model, C, p0, u0, p_end, step, target, alpha, anchor=0.0, grade=0.0) -> WProfile:
    cf, cF, s0, s1, F1 = model.kernel_data
    use = target is not None
    code, _, _, _, ps, ws, ls = K.w_profile(cf, cF, s0, s1, F1, float(C), float(p0), float(u0),
                                           float(p_end), float(step),
                                           float(target) if use else 0.0, use, True,
                                           float(anchor), float(grade))
    return WProfile(alpha=float(alpha), C=float(C), p=ps.copy(), w=ws.copy(), lam=ls.copy(),
                    exit=W_EXIT_NAMES[code])


def low_asymptote(model: ReactionModel, C: float) -> float:
    """a in w ~ a p^2 for the orbit leaving (0, 0)."""
    d0 = model.fprime0
    return (C * C + C * np.sqrt(C * C - 4.0 * d0)) / 4.0


def high_asymptote(model: ReactionModel, C: float) -> float:
    """b in w ~ F(1) + b (1 - p)^2 for the orbit entering (1, 0); b < 0."""
    d1 = float(model.df(1.0))
    return (C * C - C * np.sqrt(C * C - 4.0 * d1)) / 4.0


def _grade(k: float, C: float) -> float:
    # near a saddle the gap is u ~ k d^2 and the linearized rate is C / sqrt(2 k) / d,
    # so steps proportional to d keep RK4 well inside its stability region
    return min(SINGULAR_GRADE, 0.5 * np.sqrt(2.0 * k) / max(C, 1e-12))


def w_from_zero(model: ReactionModel, C: float, p_end: float = 1.0, target=None,
                step: float = W_STEP, offset: float = SINGULAR_OFFSET, record: bool = False):
    """w leaving p = 0 along its quadratic asymptote.

    Returns (exit, p, w, lam) or a WProfile when ``record``.
    """
    p0 = offset
    k = low_asymptote(model, C) - 0.5 * model.fprime0
    u0 = k * offset * offset
    grade = _grade(k, C)
    if record:
        return _w_run(model, C, p0, u0, p_end, step, target, 0.0, 0.0, grade)
    cf, cF, s0, s1, F1 = model.kernel_data
    use = target is not None
    code, p, w, lam, _, _, _ = K.w_profile(cf, cF, s0, s1, F1, float(C), p0, u0, float(p_end),
                                          float(step), float(target) if use else 0.0,
                                          use, False, 0.0, grade)
    return W_EXIT_NAMES[code], p, w, lam


def w_from_one(model: ReactionModel, C: float, p_end: float = 0.0, target=0.0,
               step: float = W_STEP, offset: float = SINGULAR_OFFSET):
    """w entering p = 1, integrated backwards from its asymptote. Returns (exit, p, w)."""
    p0 = 1.0 - offset
    k = high_asymptote(model, C) - 0.5 * float(model.df(1.0))
    u0 = k * offset * offset
    grade = _grade(k, C)
    cf, cF, s0, s1, F1 = model.kernel_data
    use = target is not None
    code, p, w, _, _, _, _ = K.w_profile(cf, cF, s0, s1, F1, float(C), p0, u0, float(p_end),
                                        float(step), float(target) if use else 0.0,
                                        use, False, 1.0, grade)
    return W_EXIT_NAMES[code], p, w
