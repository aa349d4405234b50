"""Compiled fixed-step integrators shared by the phase-plane and barrier code.

Reaction terms reach the kernels as Chebyshev coefficient arrays on [0, 1]
(``cf`` for f, ``cF`` for its antiderivative) plus the slopes of the
negative linear tails used outside [0, 1]. Polynomial nonlinearities are
represented exactly this way.
"""
import numpy as np
from numba import njit

# orbit exit codes
HIT_GAMMA_A = 0
LEFT_UNIT_BOX = 1
TURNED_BACK = 2
MAX_TIME = 3

# w-equation exit codes
W_REACHED_END = 0
W_HIT_TARGET = 1
W_TRUNCATED = 2

EVENT_TOL = 1e-12
H_FLOOR = 1e-12


@njit(cache=True, nogil=True)
def clenshaw(c, x):
    t = 2.0 * x - 1.0
    b1 = 0.0
    b2 = 0.0
    for k in range(c.shape[0] - 1, 0, -1):
        b0 = c[k] + 2.0 * t * b1 - b2
        b2 = b1
        b1 = b0
    return c[0] + t * b1 - b2


@njit(cache=True, nogil=True)
def f_eval(x, cf, s0, s1):
    if x < 0.0:
        return s0 * x
    if x > 1.0:
        return -s1 * (x - 1.0)
    return clenshaw(cf, x)


@njit(cache=True, nogil=True)
def F_eval(x, cF, s0, s1, F1):
    if x < 0.0:
        return 0.5 * s0 * x * x
    if x > 1.0:
        return F1 - 0.5 * s1 * (x - 1.0) ** 2
    return clenshaw(cF, x)


@njit(cache=True, nogil=True)
def _xy_step(x, y, h, C, cf, s0, s1):
    k1x = y
    k1y = -C * y - f_eval(x, cf, s0, s1)
    x2 = x + 0.5 * h * k1x
    y2 = y + 0.5 * h * k1y
    k2x = y2
    k2y = -C * y2 - f_eval(x2, cf, s0, s1)
    x3 = x + 0.5 * h * k2x
    y3 = y + 0.5 * h * k2y
    k3x = y3
    k3y = -C * y3 - f_eval(x3, cf, s0, s1)
    x4 = x + h * k3x
    y4 = y + h * k3y
    k4x = y4
    k4y = -C * y4 - f_eval(x4, cf, s0, s1)
    xn = x + h * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
    yn = y + h * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
    return xn, yn


@njit(cache=True, nogil=True)
def _orbit_event(x, y, arm_a, arm_x0, arm_x1, arm_y, cF, s0, s1, F1):
    # first triggered event, or -1
    if arm_a and 0.5 * y * y + F_eval(x, cF, s0, s1, F1) <= 0.0:
        return HIT_GAMMA_A
    if arm_x0 and x <= 0.0:
        return LEFT_UNIT_BOX
    if arm_x1 and x >= 1.0:
        return LEFT_UNIT_BOX
    if arm_y and y >= 0.0:
        return TURNED_BACK
    return -1


@njit(cache=True, nogil=True)
def orbit(cf, cF, s0, s1, F1, C, x0, y0, dt, t_max, record):
    """RK4 for X' = Y, Y' = -C Y - f(X) with bisection-refined exits.

    Returns (code, t, x, y, ts, xs, ys); sample arrays are empty unless
    ``record``.
    """
    arm_a = 0.5 * y0 * y0 + F_eval(x0, cF, s0, s1, F1) > 0.0
    arm_x0 = x0 > 0.0
    arm_x1 = x0 < 1.0
    arm_y = y0 < 0.0
    n_max = int(np.ceil(t_max / dt)) + 2 if record else 1
    ts = np.empty(n_max)
    xs = np.empty(n_max)
    ys = np.empty(n_max)
    n = 0
    if record:
        ts[0] = 0.0
        xs[0] = x0
        ys[0] = y0
        n = 1
    t = 0.0
    x = x0
    y = y0
    while True:
        h = dt
        last = False
        if t + h >= t_max:
            h = t_max - t
            last = True
        xn, yn = _xy_step(x, y, h, C, cf, s0, s1)
        code = _orbit_event(xn, yn, arm_a, arm_x0, arm_x1, arm_y, cF, s0, s1, F1)
        if code >= 0:
            lo = 0.0
            hi = h
            while hi - lo > EVENT_TOL:
                mid = 0.5 * (lo + hi)
                xm, ym = _xy_step(x, y, mid, C, cf, s0, s1)
                if _orbit_event(xm, ym, arm_a, arm_x0, arm_x1, arm_y,
                                cF, s0, s1, F1) >= 0:
                    hi = mid
                else:
                    lo = mid
            xn, yn = _xy_step(x, y, hi, C, cf, s0, s1)
            code = _orbit_event(xn, yn, arm_a, arm_x0, arm_x1, arm_y,
                                cF, s0, s1, F1)
            t = t + hi
            if record:
                ts[n] = t
                xs[n] = xn
                ys[n] = yn
                n += 1
            return code, t, xn, yn, ts[:n], xs[:n], ys[:n]
        t = t + h
        x = xn
        y = yn
        if record:
            ts[n] = t
            xs[n] = x
            ys[n] = y
            n += 1
        if last:
            return MAX_TIME, t, x, y, ts[:n], xs[:n], ys[:n]


@njit(cache=True, nogil=True)
def orbit_fixed(cf, s0, s1, C, x0, y0, h, n_steps):
    """Plain RK4 samples of the (X, Y) system, no event handling."""
    xs = np.empty(n_steps + 1)
    ys = np.empty(n_steps + 1)
    xs[0] = x0
    ys[0] = y0
    x = x0
    y = y0
    for i in range(n_steps):
        x, y = _xy_step(x, y, h, C, cf, s0, s1)
        xs[i + 1] = x
        ys[i + 1] = y
    return xs, ys


@njit(cache=True, nogil=True)
def _u_rhs(p, u, C, cf, s0, s1):
    # u = w - F(p) obeys u' = C sqrt(2u) - f(p)
    if u <= 0.0:
        return -f_eval(p, cf, s0, s1), 0.0
    r = np.sqrt(2.0 * u)
    return C * r - f_eval(p, cf, s0, s1), 0.5 / r


@njit(cache=True, nogil=True)
def _w_step(p, u, lam, h, C, cf, s0, s1):
    k1u, k1l = _u_rhs(p, u, C, cf, s0, s1)
    k2u, k2l = _u_rhs(p + 0.5 * h, u + 0.5 * h * k1u, C, cf, s0, s1)
    k3u, k3l = _u_rhs(p + 0.5 * h, u + 0.5 * h * k2u, C, cf, s0, s1)
    k4u, k4l = _u_rhs(p + h, u + h * k3u, C, cf, s0, s1)
    un = u + h * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
    ln = lam + abs(h) * (k1l + 2.0 * k2l + 2.0 * k3l + k4l) / 6.0
    return un, ln


@njit(cache=True, nogil=True)
def _w_event(p, u, target, up, use_target, cF, s0, s1, F1):
    if use_target:
        w = u + F_eval(p, cF, s0, s1, F1)
        if up and w >= target:
            return W_HIT_TARGET
        if (not up) and w <= target:
            return W_HIT_TARGET
    if u <= 0.0:
        return W_TRUNCATED
    return -1


@njit(cache=True, nogil=True)
def _grow(a):
    b = np.empty(2 * a.shape[0] + 16)
    b[:a.shape[0]] = a
    return b


@njit(cache=True, nogil=True)
def w_profile(cf, cF, s0, s1, F1, C, p0, u0, p_end, h_max, target, use_target,
              record, anchor=0.0, grade=0.0):
    """RK4 for dw/dp = C sqrt(2(w - F)) from p0 towards p_end.

    The unknown actually integrated is the gap u = w - F, starting from
    ``u0``, which keeps full relative accuracy where w and F nearly agree.

    The half-length integral 1/2 |int dp / sqrt(2(w - F))| is carried along.
    Stops at p_end, when w crosses ``target`` (w increasing with p, so the
    crossing direction follows the integration direction), or when w - F
    reaches zero. With ``grade > 0`` steps are capped by grade * |p - anchor|,
    which resolves starts next to a singular point. Returns
    (code, p, w, lam, ps, ws, lams).
    """
    span = p_end - p0
    sgn = 1.0 if span > 0.0 else -1.0
    up = span > 0.0
    # record buffers grow on demand since the step count is not known upfront
    m = int(np.ceil(abs(span) / h_max)) + 16 if record else 1
    ps = np.empty(m)
    ws = np.empty(m)
    ls = np.empty(m)
    k = 0
    if record:
        ps[0] = p0
        ws[0] = u0 + F_eval(p0, cF, s0, s1, F1)
        ls[0] = 0.0
        k = 1
    p = p0
    w = u0
    lam = 0.0
    while sgn * (p_end - p) > 0.0:
        size = h_max
        if grade > 0.0:
            size = min(size, grade * abs(p - anchor))
        if C > 0.0 and w > 0.0:
            # keep h * C / sqrt(2u), the local rate of the linearized equation, below 1/2
            size = min(size, max(0.5 * np.sqrt(2.0 * w) / C, H_FLOOR))
        h = sgn * size
        if sgn * (p_end - (p + h)) < 1e-3 * size:
            h = p_end - p
            pn = p_end
        else:
            pn = p + h
        wn, ln = _w_step(p, w, lam, h, C, cf, s0, s1)
        code = _w_event(pn, wn, target, up, use_target, cF, s0, s1, F1)
        if code >= 0:
            lo = 0.0
            hi = 1.0
            while (hi - lo) * abs(h) > EVENT_TOL:
                mid = 0.5 * (lo + hi)
                wm, lm = _w_step(p, w, lam, mid * h, C, cf, s0, s1)
                if _w_event(p + mid * h, wm, target, up, use_target,
                            cF, s0, s1, F1) >= 0:
                    hi = mid
                else:
                    lo = mid
            wn, ln = _w_step(p, w, lam, hi * h, C, cf, s0, s1)
            pn = p + hi * h
            code = _w_event(pn, wn, target, up, use_target, cF, s0, s1, F1)
            wn_full = wn + F_eval(pn, cF, s0, s1, F1)
            if record:
                if k >= ps.shape[0]:
                    ps = _grow(ps)
                    ws = _grow(ws)
                    ls = _grow(ls)
                ps[k] = pn
                ws[k] = wn_full
                ls[k] = ln
                k += 1
            return code, pn, wn_full, ln, ps[:k], ws[:k], ls[:k]
        p = pn
        w = wn
        lam = ln
        if record:
            if k >= ps.shape[0]:
                ps = _grow(ps)
                ws = _grow(ws)
                ls = _grow(ls)
            ps[k] = p
            ws[k] = w + F_eval(p, cF, s0, s1, F1)
            ls[k] = lam
            k += 1
    return W_REACHED_END, p, w + F_eval(p, cF, s0, s1, F1), lam, ps[:k], ws[:k], ls[:k]


@njit(cache=True, nogil=True)
def energy_tail(cF, s0, s1, F1, level, p0, dx, p_stop, n_max):
    """Samples of p' = -sqrt(2(level - F(p))) on a uniform x grid.

    ``dx`` may be negative (stepping leftwards, p increasing). Stops before
    p crosses ``p_stop``. Returns (ps, dps) including the start point.
    """
    ps = np.empty(n_max + 1)
    ds = np.empty(n_max + 1)
    p = p0
    ps[0] = p
    ds[0] = -np.sqrt(max(2.0 * (level - F_eval(p, cF, s0, s1, F1)), 0.0))
    k = 1
    rising = dx < 0.0
    for i in range(n_max):
        k1 = -np.sqrt(max(2.0 * (level - F_eval(p, cF, s0, s1, F1)), 0.0))
        k2 = -np.sqrt(max(2.0 * (level - F_eval(p + 0.5 * dx * k1, cF, s0, s1, F1)), 0.0))
        k3 = -np.sqrt(max(2.0 * (level - F_eval(p + 0.5 * dx * k2, cF, s0, s1, F1)), 0.0))
        k4 = -np.sqrt(max(2.0 * (level - F_eval(p + dx * k3, cF, s0, s1, F1)), 0.0))
        pn = p + dx * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        if (rising and pn >= p_stop) or ((not rising) and pn <= p_stop):
            break
        p = pn
        ps[k] = p
        ds[k] = -np.sqrt(max(2.0 * (level - F_eval(p, cF, s0, s1, F1)), 0.0))
        k += 1
    return ps[:k], ds[:k]
