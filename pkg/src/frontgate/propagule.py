"""Compactly supported initial data that force invasion (alpha-bubbles).

For p_t = p_xx + 2 h'(p)/h(p) p_x^2 + f(p), the stationary profile with
v(0) = alpha, v'(0) = 0 conserves h^4 v'^2 / 2 + SF(v), where SF is an
antiderivative of f h^4. It reaches 0 at the finite distance
L_alpha = int_0^alpha h^2 / sqrt(2 (SF(alpha) - SF(p))) dp as soon as
SF(alpha) > SF(0), and clipping it at 0 gives a sub-solution.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import InfeasibleError
from .io import write_csv
from .reaction import FrequencyLaw, ReactionModel, _cheb_interpolate, constant_law, quad

_TAYLOR_S = 1e-5
_SHORT = 1e-2
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True, eq=False)
class ScriptF:
    """Antiderivative of f h^4 vanishing at 0."""

    model: ReactionModel
    law: FrequencyLaw

    @functools.cached_property
    def _integrand(self):
        return _cheb_interpolate(
            lambda x: self.model._f_inner(x) * np.asarray(self.law.h(x), dtype=float) ** 4)

    @functools.cached_property
    def _series(self):
        return self._integrand.integ(lbnd=0.0)

    def __call__(self, x):
        out = self._series(np.asarray(x, dtype=float))
        return out if np.ndim(out) else float(out)

    def density(self, x):
        """f h^4."""
        out = self._integrand(np.asarray(x, dtype=float))
        return out if np.ndim(out) else float(out)

    @functools.cached_property
    def theta_c(self) -> float:
        """Zero of SF in (theta, 1)."""
        theta = self.model.theta
        if theta is None:
            return 0.0
        if self(1.0) <= 0:
            raise InfeasibleError("int f h^4 <= 0: no bubble triggers invasion")
        return float(optimize.brentq(self, theta, 1.0, xtol=1e-15, rtol=1e-15))


@dataclass(frozen=True, eq=False)
class Propagule:
    alpha: float
    L: float
    x: np.ndarray
    v: np.ndarray
    zero_x: float

    def __call__(self, x, center: float = 0.0):
        """Profile evaluated at positions x, extended evenly and by 0 outside."""
        r = np.abs(np.asarray(x, dtype=float) - center)
        return np.where(r <= self.L, np.interp(r, self.x, self.v), 0.0)

    def full(self) -> tuple[np.ndarray, np.ndarray]:
        """Samples over the symmetric support [-L, L]."""
        xs = np.concatenate([-self.x[:0:-1], self.x])
        vs = np.concatenate([self.v[:0:-1], self.v])
        return xs, vs

    def to_csv(self, path):
        xs, vs = self.full()
        return write_csv(path, ["x", "v"], [xs, vs])


def _check(model, law, alpha, SF):
    if model.theta is not None and alpha <= SF.theta_c:
        raise InfeasibleError(f"alpha={alpha:g} must exceed {SF.theta_c:.6g}")
    if not alpha < 1.0:
        raise ValueError("alpha must be below 1")


def bubble_length(model: ReactionModel, law: FrequencyLaw | None, alpha: float) -> float:
    """Half-width L_alpha of the bubble with peak alpha."""
    law = law or constant_law()
    SF = ScriptF(model, law)
    _check(model, law, alpha, SF)
    top = SF(alpha)
    phi = SF.density(alpha)
    dphi = float(SF._integrand.deriv()(alpha))

    # p = alpha - s^2 removes the inverse square root at the peak
    def integrand(s):
        p = alpha - s * s
        if s < _TAYLOR_S:
            gap = phi * s * s - 0.5 * dphi * s ** 4
        elif s * s < _SHORT:
            # integrate f h^4 over [p, alpha] directly; the difference of SF values cancels
            half = 0.5 * s * s
            gap = half * float(np.dot(_GL_WEIGHTS, SF.density(p + half * (_GL_NODES + 1.0))))
        else:
            gap = top - SF(p)
        return 2.0 * s * float(law.h(p)) ** 2 / np.sqrt(2.0 * gap)

    return quad(integrand, 0.0, np.sqrt(alpha), epsabs=1e-12)


def bubble_profile(model: ReactionModel, law: FrequencyLaw | None, alpha: float,
                   n_samples: int = 2048) -> Propagule:
    """Radial profile of the bubble on a uniform grid of [0, L_alpha]."""
    law = law or constant_law()
    L = bubble_length(model, law, alpha)
    xs = np.linspace(0.0, L, n_samples)
    dx = xs[1] - xs[0]
    h, dh = law.h, law.dh

    def rhs(p, q):
        return q, -2.0 * float(dh(p)) / float(h(p)) * q * q - float(model._f_inner(min(max(p, 0.0), 1.0)))

    vs = np.empty(n_samples)
    p, q = alpha, 0.0
    vs[0] = p
    zero_x = np.nan
    i = 1
    while True:
        k1 = rhs(p, q)
        k2 = rhs(p + 0.5 * dx * k1[0], q + 0.5 * dx * k1[1])
        k3 = rhs(p + 0.5 * dx * k2[0], q + 0.5 * dx * k2[1])
        k4 = rhs(p + dx * k3[0], q + dx * k3[1])
        pn = p + dx * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6.0
        q = q + dx * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6.0
        if pn <= 0.0 and np.isnan(zero_x):
            zero_x = (i - 1) * dx + dx * p / (p - pn)
        if i < n_samples:
            vs[i] = pn
        p = pn
        i += 1
        if i >= n_samples and not np.isnan(zero_x):
            break
        if i > 2 * n_samples:
            break
    vs = np.clip(vs, 0.0, alpha)
    return Propagule(alpha=float(alpha), L=float(L), x=xs, v=vs, zero_x=float(zero_x))
