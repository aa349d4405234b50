"""Bistable traveling-wave speed and the KPP minimal speed."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError
from .phaseplane import w_from_one, w_from_zero
from .reaction import BISTABLE, MONOSTABLE, ReactionModel


@dataclass(frozen=True)
class SpeedResult:
    c: float
    residual: float
    bracket: tuple[float, float]


def bistable_speed(model: ReactionModel, tol: float = 1e-8, max_iter: int = 200) -> SpeedResult:
    """Speed of the decreasing wave from 1 to 0, by bisection on c.

    For a trial c the energy w is carried from p = 0 (leaving the saddle
    along its asymptote) up to theta, and from p = 1 (entering the other
    saddle) back down to theta. Forward integration towards p = 1 is
    unstable, so the two branches are matched in the middle: the forward
    value grows with c and the backward one shrinks, and c is too small
    exactly when the forward branch ends below the backward one (or dies
    because w - F vanishes).
    """
    if model.kind != BISTABLE:
        raise ValueError("bistable_speed needs a bistable model")
    if model.degenerate:
        raise InfeasibleError("degenerate F(1)=0")
    if model.F1 < 0:
        raise InfeasibleError("F(1) < 0: the wave moves the other way; reflect u -> 1-u")
    sup = float(np.max(model.df(np.linspace(0.0, 1.0, 4001))))
    lo, hi = 0.0, 2.0 * np.sqrt(max(sup, 1e-12))
    p_mid = model.theta
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        gap = _mismatch(model, mid, p_mid)
        if gap < 0:
            lo = mid
        else:
            hi = mid
    c = 0.5 * (lo + hi)
    return SpeedResult(c=c, residual=float(abs(_mismatch(model, c, p_mid))), bracket=(lo, hi))


def _mismatch(model: ReactionModel, c: float, p_mid: float) -> float:
    code, _, w_left, _ = w_from_zero(model, c, p_mid, target=None)
    if code == "truncated":
        return -np.inf
    code, _, w_right = w_from_one(model, c, p_mid, target=None)
    if code == "truncated":
        return np.inf
    return w_left - w_right


def kpp_min_speed(model: ReactionModel) -> float:
    """2 sqrt(f'(0)) for monostable f."""
    if model.kind != MONOSTABLE:
        raise ValueError("kpp_min_speed needs a monostable model")
    d0 = model.fprime0
    if d0 <= 0:
        raise ValueError("f'(0) must be positive")
    return 2.0 * np.sqrt(d0)
