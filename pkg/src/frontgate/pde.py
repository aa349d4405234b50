"""Finite-difference simulators for 1-D reaction-diffusion fronts.

All schemes treat diffusion (and the linear advection term) implicitly with a
tridiagonal matrix factorized once, and the reaction explicitly. Boundaries
are zero-flux, imposed with mirrored ghost points.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import factorized

from .errors import ConfigError, NumericalError
from .io import write_matrix_csv, write_pgm
from .reaction import FrequencyLaw, ReactionModel, WolbachiaParams

BLOCKED = "Blocked"
PROPAGATED = "Propagated"
UNDECIDED = "Undecided"

RANGE_TOL = 1e-9


@dataclass(frozen=True)
class Grid1D:
    x_min: float = -20.0
    x_max: float = 20.0
    dx: float = 0.1

    def __post_init__(self):
        if self.x_max <= self.x_min or self.dx <= 0:
            raise ConfigError("grid needs x_max > x_min and dx > 0")
        if self.n < 16:
            raise ConfigError("grid needs at least 16 points")

    @property
    def n(self) -> int:
        return int(round((self.x_max - self.x_min) / self.dx)) + 1

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)


@dataclass(frozen=True, eq=False)
class GradientProfile:
    """Advection coefficient eta(x) of p_t - p_xx - eta p_x = f(p)."""

    kind: str = "none"
    C: float = 0.0
    L: float = 0.0
    sign: float = 1.0
    samples: tuple | None = None

    @classmethod
    def none(cls) -> GradientProfile:
        return cls("none")

    @classmethod
    def interval_constant(cls, C: float, L: float) -> GradientProfile:
        if C < 0 or L <= 0:
            raise ConfigError("interval_constant needs C >= 0 and L > 0")
        return cls("interval_constant", C, L)

    @classmethod
    def parabolic(cls, C: float, L: float, sign: float = 1.0) -> GradientProfile:
        """4 C (L^2 - x^2) / L^2 on [-L, L]; sign=-1 gives the mirrored variant."""
        if C < 0 or L <= 0:
            raise ConfigError("parabolic needs C >= 0 and L > 0")
        return cls("parabolic", C, L, float(sign))

    @classmethod
    def sampled(cls, x, eta) -> GradientProfile:
        x = np.asarray(x, dtype=float)
        eta = np.asarray(eta, dtype=float)
        if x.shape != eta.shape or x.ndim != 1 or np.any(np.diff(x) <= 0):
            raise ConfigError("sampled gradient needs increasing x and matching eta")
        if np.any(eta < 0):
            raise ConfigError("gradient coefficient must be non-negative")
        nz = np.nonzero(eta)[0]
        L = float(np.max(np.abs(x[nz]))) if nz.size else 0.0
        return cls("sampled", float(eta.max(initial=0.0)), L, 1.0, (x, eta))

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == "none":
            return (0.0, 0.0)
        if self.kind == "sampled":
            x, eta = self.samples
            nz = np.nonzero(eta)[0]
            if nz.size == 0:
                return (0.0, 0.0)
            return float(x[nz[0]]), float(x[nz[-1]])
        return (-self.L, self.L)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "none":
            return np.zeros_like(x)
        if self.kind == "interval_constant":
            return np.where(np.abs(x) <= self.L, self.C, 0.0)
        if self.kind == "parabolic":
            val = self.sign * 4.0 * self.C * (self.L ** 2 - x ** 2) / self.L ** 2
            return np.where(np.abs(x) <= self.L, val, 0.0)
        if self.kind == "sampled":
            xs, eta = self.samples
            return np.interp(x, xs, eta, left=0.0, right=0.0)
        raise ConfigError(f"unknown gradient kind {self.kind!r}")


def _ramp(t: np.ndarray) -> np.ndarray:
    # grid nodes land on the ramp ends up to rounding; snap them
    r = np.rint(t)
    return np.clip(np.where(np.abs(t - r) < 1e-9, r, t), 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class InitialDatum:
    kind: str
    x0: float = 0.0
    width: float = 1.0
    alpha: float = 0.8
    propagule: object = None
    samples: tuple | None = None

    @classmethod
    def front(cls, x0: float) -> InitialDatum:
        """1 up to x0, 0 from x0 + dx on, linear over the one cell between."""
        return cls("front", x0)

    @classmethod
    def heaviside(cls, x0: float) -> InitialDatum:
        return cls("heaviside", x0)

    @classmethod
    def smooth_front(cls, x0: float, width: float = 1.0) -> InitialDatum:
        return cls("smooth_front", x0, width)

    @classmethod
    def box(cls, x0: float, x1: float) -> InitialDatum:
        """1 on [x0, x1] with one-cell ramps on both sides."""
        return cls("box", x0, x1 - x0)

    @classmethod
    def from_propagule(cls, prop, center: float = 0.0) -> InitialDatum:
        return cls("propagule", center, alpha=prop.alpha, propagule=prop)

    @classmethod
    def sampled(cls, x, v) -> InitialDatum:
        x, v = np.asarray(x, float), np.asarray(v, float)
        if x.shape != v.shape or x.ndim != 1 or np.any(np.diff(x) <= 0):
            raise ConfigError("sampled datum needs increasing x and matching values")
        if np.any(v < 0) or np.any(v > 1):
            raise ConfigError("initial values must lie in [0, 1]")
        return cls("sampled", samples=(x, v))

    def __call__(self, grid: Grid1D) -> np.ndarray:
        x = grid.x
        if self.kind == "front":
            return _ramp((self.x0 + grid.dx - x) / grid.dx)
        if self.kind == "heaviside":
            return np.where(x <= self.x0, 1.0, 0.0)
        if self.kind == "smooth_front":
            return 0.5 * (1.0 - np.tanh((x - self.x0) / self.width))
        if self.kind == "box":
            left = _ramp((x - self.x0 + grid.dx) / grid.dx)
            right = _ramp((self.x0 + self.width + grid.dx - x) / grid.dx)
            return np.minimum(left, right)
        if self.kind == "propagule":
            return self.propagule(x, self.x0)
        if self.kind == "sampled":
            xs, vs = self.samples
            return np.interp(x, xs, vs)
        raise ConfigError(f"unknown initial datum {self.kind!r}")


@dataclass(eq=False)
class SimulationResult:
    grid: Grid1D
    times: np.ndarray
    snapshots: np.ndarray
    front_positions: np.ndarray
    final_field: np.ndarray
    dt: float
    T: float
    probe_x: float
    outcome: str = UNDECIDED
    flags: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def at(self, x: float) -> np.ndarray:
        """Time series of the field at position x (linear interpolation)."""
        return np.array([np.interp(x, self.grid.x, s) for s in self.snapshots])

    def to_csv(self, path):
        """Rows are snapshot times; the first column holds t."""
        return write_matrix_csv(path, np.column_stack([self.times, self.snapshots]),
                                header=["t"] + [f"x={v:.17g}" for v in self.grid.x])

    def to_pgm(self, path, comment: str = ""):
        """Heatmap, time increasing downwards."""
        return write_pgm(path, self.snapshots, comment)


# linear algebra --------------------------------------------------------------

def _operator(grid: Grid1D, eta: np.ndarray, dt: float):
    """Factorized I - dt (D2 + eta D1) with mirrored ghost points."""
    n, h = grid.n, grid.dx
    lower = np.full(n, 1.0 / h ** 2) - eta / (2 * h)
    upper = np.full(n, 1.0 / h ** 2) + eta / (2 * h)
    diag = np.full(n, -2.0 / h ** 2)
    # ghost p_{-1} = p_1 and p_n = p_{n-2}; the mirrored first difference vanishes
    up = upper.copy()
    lo = lower.copy()
    up[0] = 2.0 / h ** 2
    lo[-1] = 2.0 / h ** 2
    A = sparse.diags([-dt * lo[1:], 1.0 - dt * diag, -dt * up[:-1]], [-1, 0, 1], format="csc")
    return factorized(A)


def _gradient(p: np.ndarray, h: float) -> np.ndarray:
    g = np.empty_like(p)
    g[1:-1] = (p[2:] - p[:-2]) / (2 * h)
    g[0] = 0.0
    g[-1] = 0.0
    return g


def _check_dt(model: ReactionModel, dt: float):
    if dt <= 0 or dt > 0.5:
        raise ConfigError("dt must lie in (0, 0.5]")
    if dt * model.max_abs_df >= 1.0:
        raise ConfigError(f"dt*sup|f'| = {dt * model.max_abs_df:.3g} >= 1")


def _steps(dt: float, T: float, every: float) -> tuple[int, int]:
    n_steps = int(round(T / dt))
    if abs(n_steps * dt - T) > 1e-9 * max(T, 1.0):
        raise ConfigError("T must be a multiple of dt")
    stride = max(int(round(every / dt)), 1)
    return n_steps, stride


def _run(p0, step, grid, dt, T, every, probe_x, window, check_range=True):
    n_steps, stride = _steps(dt, T, every)
    times = [0.0]
    snaps = [p0.copy()]
    p = p0.copy()
    for k in range(1, n_steps + 1):
        p = step(p)
        if k % stride == 0 or k == n_steps:
            if not np.all(np.isfinite(p)):
                raise NumericalError(f"non-finite field at t={k * dt:g}")
            times.append(k * dt)
            snaps.append(p.copy())
    snaps = np.array(snaps)
    times = np.array(times)
    flags = []
    if check_range:
        lo, hi = snaps.min(), snaps.max()
        if lo < -RANGE_TOL or hi > 1 + RANGE_TOL:
            flags.append(f"range_violation[{lo:.3g},{hi:.3g}]")
    fronts = np.array([front_position(s, grid) for s in snaps])
    res = SimulationResult(grid=grid, times=times, snapshots=snaps, front_positions=fronts,
                           final_field=p, dt=dt, T=T, probe_x=probe_x, flags=flags)
    res.outcome = classify_outcome(res, probe_x, window)
    return res


def _default_probe(grid: Grid1D, support) -> float:
    right = max(support[1], grid.x_min + 0.5 * (grid.x_max - grid.x_min))
    return right + 0.5 * (grid.x_max - right)


def _initial(init, grid):
    if isinstance(init, InitialDatum):
        return init(grid).astype(float)
    p0 = np.asarray(init, dtype=float)
    if p0.shape != (grid.n,):
        raise ConfigError("initial field does not match the grid")
    return p0.copy()


# simulators ------------------------------------------------------------------

def simulate_heterogeneous(model: ReactionModel, eta: GradientProfile | None, init,
                           grid: Grid1D = Grid1D(), dt: float = 0.05, T: float = 400.0,
                           snapshot_every: float = 1.0, probe_x: float | None = None,
                           window: float = 0.2) -> SimulationResult:
    """p_t - p_xx - eta(x) p_x = f(p)."""
    eta = eta or GradientProfile.none()
    _check_dt(model, dt)
    lo, hi = eta.support
    if eta.kind != "none" and (lo < grid.x_min or hi > grid.x_max):
        raise ConfigError("gradient support exceeds the grid")
    if eta.kind != "none" and (lo - grid.x_min < 5 or grid.x_max - hi < 5):
        raise ConfigError("grid must extend at least 5 beyond the gradient support")
    coef = eta(grid.x)
    solve = _operator(grid, coef, dt)
    f = model.f

    def step(p):
        return solve(p + dt * f(p))

    probe = _default_probe(grid, eta.support) if probe_x is None else probe_x
    return _run(_initial(init, grid), step, grid, dt, T, snapshot_every, probe, window)


def simulate_frequency_law(model: ReactionModel, law: FrequencyLaw, init,
                           grid: Grid1D = Grid1D(), dt: float = 0.05, T: float = 400.0,
                           snapshot_every: float = 1.0, probe_x: float | None = None,
                           window: float = 0.2) -> SimulationResult:
    """p_t - p_xx - 2 h'(p)/h(p) p_x^2 = f(p)."""
    _check_dt(model, dt)
    solve = _operator(grid, np.zeros(grid.n), dt)
    f = model.f
    h, dh = law.h, law.dh
    dx = grid.dx

    def step(p):
        q = np.clip(p, 0.0, 1.0)
        hv = np.asarray(h(q), dtype=float)
        if np.any(hv <= 0):
            raise NumericalError("h is not positive along the solution")
        g = _gradient(p, dx)
        return solve(p + dt * (f(p) + 2.0 * np.asarray(dh(q), dtype=float) / hv * g * g))

    probe = _default_probe(grid, (0.0, 0.0)) if probe_x is None else probe_x
    return _run(_initial(init, grid), step, grid, dt, T, snapshot_every, probe, window)


def carrying_capacity(grid: Grid1D, C: float, L: float, K_L: float = 1.0) -> np.ndarray:
    """K_L exp(C min((x + L)_+, 2L)): flat, exponential ramp on [-L, L], flat."""
    return K_L * np.exp(C * np.minimum(np.maximum(grid.x + L, 0.0), 2.0 * L))


def two_population_equilibria(params: WolbachiaParams, K: np.ndarray):
    """Densities of the all-infected and all-uninfected steady states."""
    Fu = params.sigma_Fu / params.eps
    n_inf = K * (1.0 - params.delta * params.d_u / ((1.0 - params.s_f) * Fu))
    n_un = K * (1.0 - params.d_u / Fu)
    if np.any(n_inf <= 0) or np.any(n_un <= 0):
        raise ConfigError("fecundity too low for positive steady states")
    return n_inf, n_un


def simulate_two_population(params: WolbachiaParams, K, init, grid: Grid1D = Grid1D(),
                            dt: float = 0.02, T: float = 400.0, snapshot_every: float = 1.0,
                            probe_x: float | None = None, window: float = 0.2,
                            support: tuple[float, float] = (0.0, 0.0)) -> SimulationResult:
    """Infected / uninfected densities with a heterogeneous carrying capacity K(x).

    The fecundity of uninfected individuals is sigma_Fu / eps. ``init`` is
    either a pair (n_i, n_u) of arrays or an InitialDatum for the infected
    frequency, in which case densities start at the local steady states.
    """
    K = np.asarray(K, dtype=float)
    if K.shape != (grid.n,) or np.any(K <= 0):
        raise ConfigError("K must be positive on every grid point")
    if params.eps <= 0:
        raise ConfigError("the two-population model needs eps > 0")
    Fu = params.sigma_Fu / params.eps
    sf, sh, delta, du = params.s_f, params.s_h, params.delta, params.d_u
    if isinstance(init, InitialDatum):
        q = init(grid)
        n_inf, n_un = two_population_equilibria(params, K)
        ni, nu = q * n_inf, (1.0 - q) * n_un
    else:
        ni, nu = (np.asarray(a, dtype=float).copy() for a in init)
    if np.any(ni < 0) or np.any(nu < 0):
        raise ConfigError("initial densities must be non-negative")
    rate = Fu * (1 + 1.0) + delta * du
    if dt * rate >= 2.0:
        raise ConfigError("dt too large for the reaction rates")
    solve = _operator(grid, np.zeros(grid.n), dt)
    n_steps, stride = _steps(dt, T, snapshot_every)

    def freq(a, b):
        tot = a + b
        return np.where(tot > 0, a / np.where(tot > 0, tot, 1.0), 0.0)

    times, snaps = [0.0], [freq(ni, nu)]
    min_density = min(ni.min(), nu.min())
    for k in range(1, n_steps + 1):
        N = ni + nu
        p = freq(ni, nu)
        crowd = 1.0 - N / K
        ri = (1.0 - sf) * Fu * crowd - delta * du
        ru = Fu * (1.0 - sh * p) * crowd - du
        ni = solve(ni + dt * ri * ni)
        nu = solve(nu + dt * ru * nu)
        if k % stride == 0 or k == n_steps:
            if not (np.all(np.isfinite(ni)) and np.all(np.isfinite(nu))):
                raise NumericalError(f"non-finite densities at t={k * dt:g}")
            min_density = min(min_density, ni.min(), nu.min())
            if min_density < -RANGE_TOL:
                raise NumericalError("negative densities: scheme failure")
            times.append(k * dt)
            snaps.append(freq(ni, nu))
    snaps = np.array(snaps)
    fronts = np.array([front_position(s, grid) for s in snaps])
    probe = _default_probe(grid, support) if probe_x is None else probe_x
    res = SimulationResult(grid=grid, times=np.array(times), snapshots=snaps,
                           front_positions=fronts, final_field=snaps[-1], dt=dt, T=T,
                           probe_x=probe, extra={"n_i": ni, "n_u": nu})
    res.outcome = classify_outcome(res, probe, window)
    return res


# diagnostics -----------------------------------------------------------------

def front_position(field, grid: Grid1D, level: float = 0.5) -> float:
    """Rightmost linearly interpolated crossing of ``level``; nan if none."""
    p = np.asarray(field, dtype=float) - level
    s = np.sign(p)
    idx = np.nonzero(s[:-1] * s[1:] <= 0)[0]
    idx = idx[(p[idx] != 0) | (p[idx + 1] != 0)] if idx.size else idx
    if idx.size == 0:
        return float("nan")
    i = idx[-1]
    x = grid.x
    if p[i + 1] == p[i]:
        return float(x[i + 1])
    return float(x[i] + (x[i + 1] - x[i]) * p[i] / (p[i] - p[i + 1]))


def classify_outcome(result: SimulationResult, probe_x: float | None = None,
                     window: float = 0.2) -> str:
    """Propagated, Blocked or Undecided from the last snapshots."""
    probe = result.probe_x if probe_x is None else probe_x
    grid = result.grid
    final = np.interp(probe, grid.x, result.final_field)
    if final > 0.9:
        return PROPAGATED
    fronts = result.front_positions
    t0 = result.T * (1.0 - window)
    late = fronts[result.times >= t0 - 1e-12]
    if np.all(np.isnan(late)):
        if np.all(result.final_field < 0.5):
            if "no_front" not in result.flags:
                result.flags.append("no_front")
            return BLOCKED
        return UNDECIDED
    if np.any(np.isnan(late)):
        return UNDECIDED
    moved = late.max() - late.min()
    if moved < grid.dx and final < 0.1:
        return BLOCKED
    return UNDECIDED


def front_speed(result: SimulationResult, t_from: float | None = None) -> float:
    """Least-squares slope of the front position over t >= t_from."""
    t_from = 0.25 * result.T if t_from is None else t_from
    m = (result.times >= t_from) & np.isfinite(result.front_positions)
    if m.sum() < 2:
        return float("nan")
    return float(np.polyfit(result.times[m], result.front_positions[m], 1)[0])
