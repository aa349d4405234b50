"""Reaction nonlinearities, population laws and the change of variable.

Every nonlinearity is stored as a Chebyshev series on [0, 1] (exact for
polynomials), which gives a cheap antiderivative F and a representation the
compiled integrators can evaluate. Outside [0, 1] f continues with negative
linear tails, so that f < 0 on (-inf, 0) and (1, inf).
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from scipy import integrate, optimize

BISTABLE = "bistable"
MONOSTABLE = "monostable"

QUAD_EPSABS = 1e-10
_CHEB_TOL = 1e-15
_UNIT = [0.0, 1.0]


def _cheb_interpolate(func: Callable, max_deg: int = 512) -> Chebyshev:
    deg = 16
    while True:
        series = Chebyshev.interpolate(func, deg, domain=_UNIT)
        coef = np.abs(series.coef)
        scale = max(coef.max(), 1e-300)
        if coef[-4:].max() <= _CHEB_TOL * scale or deg >= max_deg:
            return series.trim(_CHEB_TOL * scale * 1e-2)
        deg *= 2


def quad(func: Callable, a: float, b: float, epsabs: float = QUAD_EPSABS) -> float:
    """Adaptive Gauss-Kronrod quadrature of a scalar function."""
    value, _ = integrate.quad(func, a, b, epsabs=epsabs, epsrel=1e-12, limit=200)
    return value


@dataclass(frozen=True, eq=False)
class ReactionModel:
    """A reaction term f on [0, 1] with its potential F(x) = int_0^x f.

    ``theta`` is the interior zero for bistable models. Construct through
    :func:`make_cubic`, :func:`make_wolbachia_f`, :func:`make_logistic` or
    :meth:`from_callable`.
    """

    name: str
    kind: str
    theta: float | None
    series: Chebyshev
    exact_f: Callable | None = None
    exact_F: Callable | None = None
    exact_df: Callable | None = None
    params: dict = field(default_factory=dict)

    @classmethod
    def from_callable(cls, f: Callable, name: str = "custom",
                      kind: str | None = None, params: dict | None = None) -> ReactionModel:
        series = _cheb_interpolate(lambda x: np.asarray(f(x), dtype=float))
        model = cls(name=name, kind=MONOSTABLE, theta=None, series=series,
                    exact_f=f, params=dict(params or {}))
        detected, theta = model._classify()
        if kind is not None and kind != detected:
            raise ValueError(f"f is {detected}, not {kind}")
        return replace(model, kind=detected, theta=theta)

    def _classify(self) -> tuple[str, float | None]:
        x = np.linspace(0.0, 1.0, 2001)[1:-1]
        vals = self._f_inner(x)
        if np.abs(self._f_inner(np.array([0.0, 1.0]))).max() > 1e-10:
            raise ValueError("f must vanish at 0 and 1")
        if np.all(vals > 0):
            return MONOSTABLE, None
        neg = vals < 0
        k = np.argmin(neg)
        if not neg[0] or not np.all(neg[:k]) or np.any(neg[k:]):
            raise ValueError("f is neither bistable nor monostable on (0, 1)")
        theta = optimize.brentq(self._f_inner, x[k - 1], x[k], xtol=1e-15)
        return BISTABLE, theta

    # evaluation -----------------------------------------------------------
    def _f_inner(self, x):
        if self.exact_f is not None:
            return np.asarray(self.exact_f(x), dtype=float)
        return self.series(x)

    def f(self, x):
        """Reaction rate, continued by negative linear tails outside [0, 1]."""
        x = np.asarray(x, dtype=float)
        inner = self._f_inner(np.clip(x, 0.0, 1.0))
        out = np.where(x < 0.0, self.tail_slopes[0] * x, inner)
        out = np.where(x > 1.0, -self.tail_slopes[1] * (x - 1.0), out)
        return out if out.ndim else float(out)

    def df(self, x):
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, 0.0, 1.0)
        if self.exact_df is not None:
            out = np.asarray(self.exact_df(xc), dtype=float)
        else:
            out = self._dseries(xc)
        out = np.where(x < 0.0, self.tail_slopes[0], out)
        out = np.where(x > 1.0, -self.tail_slopes[1], out)
        return out if out.ndim else float(out)

    def F(self, x):
        """Potential F(x) = int_0^x f."""
        x = np.asarray(x, dtype=float)
        inner = self._F_inner(np.clip(x, 0.0, 1.0))
        s0, s1 = self.tail_slopes
        out = np.where(x < 0.0, 0.5 * s0 * x * x, inner)
        out = np.where(x > 1.0, self.F1 - 0.5 * s1 * (x - 1.0) ** 2, out)
        return out if out.ndim else float(out)

    __call__ = f

    # derived quantities ---------------------------------------------------
    @functools.cached_property
    def _dseries(self) -> Chebyshev:
        return self.series.deriv()

    @functools.cached_property
    def _Fseries(self) -> Chebyshev:
        return self.series.integ(lbnd=0.0)

    def _F_inner(self, x):
        if self.exact_F is not None:
            return np.asarray(self.exact_F(x), dtype=float)
        return self._Fseries(x)

    @functools.cached_property
    def F1(self) -> float:
        return float(self._F_inner(1.0))

    @functools.cached_property
    def tail_slopes(self) -> tuple[float, float]:
        d0 = float(self.exact_df(0.0)) if self.exact_df else float(self._dseries(0.0))
        d1 = float(self.exact_df(1.0)) if self.exact_df else float(self._dseries(1.0))
        return abs(d0), abs(d1)

    @property
    def fprime0(self) -> float:
        return float(self.df(0.0))

    @property
    def degenerate(self) -> bool:
        """True when F(1) vanishes (balanced bistable reaction)."""
        return self.kind == BISTABLE and abs(self.F1) < 1e-13

    @functools.cached_property
    def theta_c(self) -> float | None:
        """Zero of F in (theta, 1); None unless bistable with F(1) > 0."""
        if self.kind != BISTABLE or self.F1 <= 0 or self.degenerate:
            return None
        if "theta_c" in self.params:
            return self.params["theta_c"]
        return optimize.brentq(self.F, self.theta, 1.0, xtol=1e-15, rtol=1e-15)

    @functools.cached_property
    def F_theta(self) -> float:
        return float(self.F(self.theta))

    @functools.cached_property
    def max_abs_df(self) -> float:
        x = np.linspace(0.0, 1.0, 4001)
        return float(np.abs(self.df(x)).max())

    @functools.cached_property
    def kernel_data(self) -> tuple:
        """(cf, cF, s0, s1, F1) for the compiled integrators."""
        cf = np.ascontiguousarray(self.series.coef, dtype=float)
        cF = np.ascontiguousarray(self._Fseries.coef, dtype=float)
        s0, s1 = self.tail_slopes
        return cf, cF, s0, s1, self.F1

    @functools.cached_property
    def c_star(self) -> float:
        """Bistable wave speed, cached."""
        from .wavespeed import bistable_speed
        return bistable_speed(self, tol=1e-11).c

    def require_barrier_ready(self):
        if self.kind != BISTABLE:
            raise ValueError(f"{self.name}: barrier computations need a bistable f")
        if self.degenerate:
            raise ValueError(f"{self.name}: degenerate F(1)=0")
        if self.F1 < 0:
            raise ValueError(f"{self.name}: F(1) < 0; reflect u -> 1-u first")

    def reflected(self) -> ReactionModel:
        """The model for 1 - u, i.e. f~(u) = -f(1 - u)."""
        return ReactionModel.from_callable(lambda x: -self._f_inner(1.0 - np.asarray(x)),
                                           name=f"{self.name}-reflected",
                                           params=dict(self.params))


# constructors ------------------------------------------------------------

def make_cubic(theta: float) -> ReactionModel:
    """f(u) = u (1 - u) (u - theta)."""
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie in (0, 1)")
    poly = Polynomial([0.0, -theta, 1.0 + theta, -1.0])
    Fpoly = poly.integ(lbnd=0.0)
    params = {"theta": theta}
    if theta < 0.5:
        params["theta_c"] = (2 * (1 + theta) - np.sqrt(4 * (1 + theta) ** 2 - 18 * theta)) / 3
    return ReactionModel(
        name=f"cubic(theta={theta:g})", kind=BISTABLE, theta=theta,
        series=poly.convert(domain=_UNIT, kind=Chebyshev),
        exact_f=poly, exact_F=Fpoly, exact_df=poly.deriv(), params=params)


def make_logistic(r: float = 1.0) -> ReactionModel:
    """Monostable KPP term f(u) = r u (1 - u)."""
    if r <= 0:
        raise ValueError("r must be positive")
    poly = Polynomial([0.0, r, -r])
    return ReactionModel(
        name=f"logistic(r={r:g})", kind=MONOSTABLE, theta=None,
        series=poly.convert(domain=_UNIT, kind=Chebyshev),
        exact_f=poly, exact_F=poly.integ(lbnd=0.0), exact_df=poly.deriv(),
        params={"r": r})


@dataclass(frozen=True)
class WolbachiaParams:
    s_f: float = 0.1
    s_h: float = 0.8
    delta: float = 1.25
    d_s: float = 1.0
    d_u: float = 1.0
    sigma_Fu: float = 1.0
    eps: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.s_f < 1.0:
            raise ValueError("s_f must lie in [0, 1)")
        if not 0.0 < self.s_h <= 1.0:
            raise ValueError("s_h must lie in (0, 1]")
        for name in ("delta", "d_s", "d_u", "sigma_Fu"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.eps < 0:
            raise ValueError("eps must be non-negative")
        if self.delta * self.s_h - self.delta + 1.0 - self.s_f <= 0:
            raise ValueError("bistability condition delta*s_h - delta + 1 - s_f > 0 violated")

    def denominator(self, p):
        return self.s_h * p * p - (self.s_f + self.s_h) * p + 1.0

    def denominator_vanishes(self) -> bool:
        roots = np.roots([self.s_h, -(self.s_f + self.s_h), 1.0])
        real = roots[np.abs(roots.imag) < 1e-14].real
        return bool(np.any((real >= 0.0) & (real <= 1.0)))


def make_wolbachia_f(params: WolbachiaParams) -> ReactionModel:
    """Frequency reaction term for a Wolbachia infection with incompatibility."""
    sf, sh, d, ds = params.s_f, params.s_h, params.delta, params.d_s
    if params.denominator_vanishes():
        raise ValueError("denominator s_h p^2 - (s_f+s_h) p + 1 vanishes in [0, 1]")
    num = Polynomial([(1 - sf) - d, d * (1 + sh) - (1 - sf), -sh * d])
    den = Polynomial([1.0, -(sf + sh), sh])
    x = Polynomial([0.0, ds])
    top = x * num

    def f(p):
        return top(p) / den(p)

    def df(p):
        return (top.deriv()(p) * den(p) - top(p) * den.deriv()(p)) / den(p) ** 2

    series = _cheb_interpolate(f)
    roots = num.roots()
    inside = [r.real for r in roots if abs(r.imag) < 1e-14 and 1e-12 < r.real < 1 - 1e-12]
    kind = BISTABLE if inside else MONOSTABLE
    theta = float(inside[0]) if inside else None
    return ReactionModel(name="wolbachia", kind=kind, theta=theta, series=series,
                         exact_f=f, exact_df=df,
                         params={k: getattr(params, k) for k in params.__dataclass_fields__})


def potential(model: ReactionModel, x):
    """F(x) = int_0^x f(xi) dxi."""
    return model.F(x)


# population laws ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FrequencyLaw:
    """Population per unit frequency, h > 0 on [0, 1]."""

    h: Callable
    dh: Callable
    normalized: bool = False
    theta0: float | None = None
    name: str = "h"

    def __post_init__(self):
        x = np.linspace(0.0, 1.0, 2001)
        if np.any(np.asarray(self.h(x)) <= 0):
            raise ValueError("h must be positive on [0, 1]")

    @functools.cached_property
    def _h2_series(self) -> Chebyshev:
        return _cheb_interpolate(lambda x: np.asarray(self.h(x), dtype=float) ** 2)

    @functools.cached_property
    def _H_series(self) -> Chebyshev:
        return self._h2_series.integ(lbnd=0.0)

    @property
    def h2_integral(self) -> float:
        return float(self._H_series(1.0))

    def H(self, x):
        """H(x) = int_0^x h^2."""
        out = self._H_series(np.asarray(x, dtype=float))
        return out if np.ndim(out) else float(out)

    def H_inv(self, y):
        """Inverse of H on [0, H(1)], by safeguarded Newton iteration."""
        y = np.asarray(y, dtype=float)
        total = self.h2_integral
        x = np.clip(y / total, 0.0, 1.0)
        lo = np.zeros_like(x)
        hi = np.ones_like(x)
        for _ in range(60):
            r = self._H_series(x) - y
            lo = np.where(r < 0, x, lo)
            hi = np.where(r > 0, x, hi)
            step = r / self._h2_series(x)
            x_new = x - step
            bad = (x_new <= lo) | (x_new >= hi)
            x_new = np.where(bad, 0.5 * (lo + hi), x_new)
            done = np.abs(x_new - x) < 1e-16
            x = x_new
            if np.all(done):
                break
        return x if x.ndim else float(x)

    def normalize(self) -> FrequencyLaw:
        """Rescale so that int_0^1 h^2 = 1 (idempotent)."""
        s = 1.0 / np.sqrt(self.h2_integral)
        if self.normalized and abs(s - 1.0) < 1e-14:
            return self
        h, dh = self.h, self.dh
        return FrequencyLaw(h=lambda x: s * np.asarray(h(x)),
                            dh=lambda x: s * np.asarray(dh(x)),
                            normalized=True, theta0=self.theta0, name=self.name)


def constant_law() -> FrequencyLaw:
    return FrequencyLaw(h=lambda x: np.ones_like(np.asarray(x, dtype=float)),
                        dh=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
                        normalized=True, name="constant")


def wolbachia_theta0(params: WolbachiaParams) -> float | None:
    """The single zero of h' in [0, 1]; None when eps = 0."""
    if params.eps == 0:
        return None
    d, sf, sh = params.delta, params.s_f, params.s_h
    if d == 1.0:
        return 0.5 + sf / (2 * sh)
    return (-1.0 + np.sqrt(1.0 + (d - 1) * ((d - 1 + sf) / sh + 1.0))) / (d - 1)


def make_wolbachia_h(params: WolbachiaParams) -> FrequencyLaw:
    """Large-population total density as a function of infection frequency."""
    d, sf, sh = params.delta, params.s_f, params.s_h
    k = params.eps * params.d_u / params.sigma_Fu

    def h(p):
        p = np.asarray(p, dtype=float)
        return 1.0 - k * ((d - 1) * p + 1) / params.denominator(p)

    def dh(p):
        p = np.asarray(p, dtype=float)
        return k * ((d - 1) * sh * p * p + 2 * sh * p - (d - 1 + sf + sh)) / params.denominator(p) ** 2

    if params.denominator_vanishes():
        raise ValueError("denominator vanishes in [0, 1]")
    x = np.linspace(0.0, 1.0, 2001)
    if np.any(h(x) <= 0):
        raise ValueError(f"h <= 0 somewhere on [0, 1] for eps={params.eps}")
    return FrequencyLaw(h=h, dh=dh, normalized=params.eps == 0,
                        theta0=wolbachia_theta0(params), name=f"wolbachia_h(eps={params.eps:g})")


def wolbachia_h0(params: WolbachiaParams, p):
    """Limit (n + sigma_0) of the rescaled total population at frequency p.

    Uses the fecundity factor (1 - s_f) p + (1 - p)(1 - s_h p) of the
    two-population model; ``sigma_Fu`` plays the role of F_u.
    """
    p = np.asarray(p, dtype=float)
    den = params.sigma_Fu * ((1 - params.s_f) * p + (1 - p) * (1 - params.s_h * p))
    if np.any(den <= 0):
        raise ValueError("denominator vanishes")
    out = params.d_u * (params.delta * p + 1 - p) / den
    return out if out.ndim else float(out)


# change of variable ------------------------------------------------------

def change_of_variable(model: ReactionModel, law: FrequencyLaw):
    """Reduce p_t - p_xx - 2 h'(p)/h(p) p_x^2 = f(p) to y_t - y_xx = g(y).

    Returns (g, H, H_inv) with y = H(p) and g(H(x)) = f(x) h(x)^2.
    """
    if not law.normalized or abs(law.h2_integral - 1.0) > 1e-10:
        raise ValueError("law must be normalized (int h^2 = 1)")

    def g(y):
        x = law.H_inv(np.clip(y, 0.0, 1.0))
        return model._f_inner(x) * np.asarray(law.h(x)) ** 2

    gm = ReactionModel.from_callable(g, name=f"g[{model.name},{law.name}]")
    if model.kind == BISTABLE:
        gm = replace(gm, theta=law.H(model.theta))
    # the interpolant is exact to rounding and avoids inverting H on every call
    return replace(gm, exact_f=None), law.H, law.H_inv


def speed_sign_integral(model: ReactionModel, law: FrequencyLaw) -> float:
    """int_0^1 f h^4, whose sign is that of the bistable wave speed."""
    return quad(lambda x: float(model._f_inner(x)) * float(law.h(x)) ** 4, 0.0, 1.0,
                epsabs=1e-14)
