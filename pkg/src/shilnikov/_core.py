"""Adaptive Dormand-Prince 5(4) kernels specialized to the cubic saddle-focus flow.

The right-hand side (y, z, x^3 - a^2 x - y - b z) is inlined into the stepper so
the hot loop compiles to straight scalar code under numba.  Everything here works
unchanged (just slowly) if numba is missing; the public API lives in
:mod:`shilnikov.integrate`.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is in the default install
    def njit(*args, **kwargs):
        def wrap(func):
            return func

        if args and callable(args[0]):
            return args[0]
        return wrap


# Dormand-Prince 5(4) tableau.  Stage 7 is evaluated at the accepted endpoint
# (FSAL), so row 6 of A doubles as the 5th-order propagation weights.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.zeros((7, 7))
_A[1, :1] = [1 / 5]
_A[2, :2] = [3 / 40, 9 / 40]
_A[3, :3] = [44 / 45, -56 / 15, 32 / 9]
_A[4, :4] = [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]
_A[5, :5] = [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]
_A[6, :6] = [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]

# Difference between the 5th- and embedded 4th-order weights.
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200,
               22 / 525, -1 / 40])

# Free 4th-order interpolant: y(t0 + u*h) = y0 + h * (K^T P) @ (u, u^2, u^3, u^4).
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608,
     -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933,
     87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304,
     -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408,
     701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883,
     -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
MIN_STEP = 1e-14

# Driver exit statuses.
REACHED_END = 0
DIVERGED = 1
STEP_UNDERFLOW = 2
EVENTS_FULL = 3
STEPS_FULL = 4


@njit(cache=True, nogil=True)
def _fill_dense(kx, ky, kz, q):
    """Write the 3x4 interpolant coefficients (K^T P) into q, row-major."""
    for j in range(4):
        sx = 0.0
        sy = 0.0
        sz = 0.0
        for s in range(7):
            p = _P[s, j]
            sx += kx[s] * p
            sy += ky[s] * p
            sz += kz[s] * p
        q[j] = sx
        q[4 + j] = sy
        q[8 + j] = sz


@njit(cache=True, nogil=True)
def _dense_component(y0c, h, q, off, u):
    return y0c + h * u * (q[off] + u * (q[off + 1] + u * (q[off + 2] + u * q[off + 3])))


@njit(cache=True, nogil=True)
def _refine_section_root(y0y, h, q, ga, gb):
    """Locate u in (0, 1] with zero dense y-component: bisection, then secant."""
    ua = 0.0
    ub = 1.0
    # Bisection narrows the bracket; 30 halvings leave ~1e-9 in u.
    for _ in range(30):
        um = 0.5 * (ua + ub)
        gm = _dense_component(y0y, h, q, 4, um)
        if gm == 0.0:
            return um
        if (ga > 0.0) == (gm > 0.0):
            ua = um
            ga = gm
        else:
            ub = um
            gb = gm
    # Secant polish from the bracket ends.
    u0 = ua
    g0 = ga
    u1 = ub
    g1 = gb
    for _ in range(30):
        denom = g1 - g0
        if denom == 0.0:
            break
        u2 = u1 - g1 * (u1 - u0) / denom
        if u2 < 0.0 or u2 > 1.0:
            break
        g2 = _dense_component(y0y, h, q, 4, u2)
        u0, g0 = u1, g1
        u1, g1 = u2, g2
        if g2 == 0.0 or abs(u1 - u0) < 1e-16:
            break
    return u1


@njit(cache=True, nogil=True)
def _initial_step(x, y, z, a2, b, sign, rtol, atol, max_step, remaining):
    f0x = sign * y
    f0y = sign * z
    f0z = sign * (x * x * x - a2 * x - y - b * z)
    scx = atol + rtol * abs(x)
    scy = atol + rtol * abs(y)
    scz = atol + rtol * abs(z)
    d0 = np.sqrt(((x / scx) ** 2 + (y / scy) ** 2 + (z / scz) ** 2) / 3.0)
    d1 = np.sqrt(((f0x / scx) ** 2 + (f0y / scy) ** 2 + (f0z / scz) ** 2) / 3.0)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    x1 = x + h0 * f0x
    y1 = y + h0 * f0y
    z1 = z + h0 * f0z
    f1x = sign * y1
    f1y = sign * z1
    f1z = sign * (x1 * x1 * x1 - a2 * x1 - y1 - b * z1)
    d2 = np.sqrt((((f1x - f0x) / scx) ** 2 + ((f1y - f0y) / scy) ** 2
                  + ((f1z - f0z) / scz) ** 2) / 3.0) / h0
    dm = max(d1, d2)
    if dm <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / dm) ** 0.2
    h = min(100.0 * h0, h1)
    if h > max_step:
        h = max_step
    if h > remaining:
        h = remaining
    return h


@njit(cache=True, nogil=True)
def drive(x, y, z, t, t_end, a2, b, sign, rtol, atol, max_step, h,
          div_sq, ev_dir, ev_t, ev_s, ev_d, want_steps, st_t, st_h, st_y, st_q):
    """Advance the flow until t_end, an exit condition, or a full buffer.

    Events are zero crossings of the y coordinate, refined on the dense
    interpolant; ev_dir selects -1 (decreasing), +1 (increasing) or 0 (both).
    Returns (status, t, x, y, z, h_next, n_events, n_steps).
    """
    kx = np.empty(7)
    ky = np.empty(7)
    kz = np.empty(7)
    q = np.empty(12)

    ev_cap = ev_t.shape[0]
    st_cap = st_t.shape[0]
    n_ev = 0
    n_st = 0

    if h <= 0.0:
        h = _initial_step(x, y, z, a2, b, sign, rtol, atol, max_step,
                          max(t_end - t, MIN_STEP))

    kx[0] = sign * y
    ky[0] = sign * z
    kz[0] = sign * (x * x * x - a2 * x - y - b * z)

    while True:
        if t_end - t <= MIN_STEP * max(1.0, abs(t)):
            return REACHED_END, t_end, x, y, z, h, n_ev, n_st

        if h > max_step:
            h = max_step
        if h > t_end - t:
            h = t_end - t

        rejected = False
        while True:
            if h < MIN_STEP:
                return STEP_UNDERFLOW, t, x, y, z, h, n_ev, n_st
            for s in range(1, 7):
                sx = 0.0
                sy = 0.0
                sz = 0.0
                for j in range(s):
                    a_sj = _A[s, j]
                    sx += a_sj * kx[j]
                    sy += a_sj * ky[j]
                    sz += a_sj * kz[j]
                xs = x + h * sx
                ys = y + h * sy
                zs = z + h * sz
                kx[s] = sign * ys
                ky[s] = sign * zs
                kz[s] = sign * (xs * xs * xs - a2 * xs - ys - b * zs)
                if s == 6:
                    xn = xs
                    yn = ys
                    zn = zs
            ex = 0.0
            ey = 0.0
            ez = 0.0
            for s in range(7):
                e_s = _E[s]
                ex += e_s * kx[s]
                ey += e_s * ky[s]
                ez += e_s * kz[s]
            scx = atol + rtol * max(abs(x), abs(xn))
            scy = atol + rtol * max(abs(y), abs(yn))
            scz = atol + rtol * max(abs(z), abs(zn))
            err = np.sqrt(((h * ex / scx) ** 2 + (h * ey / scy) ** 2
                           + (h * ez / scz) ** 2) / 3.0)
            if err <= 1.0 or np.isnan(err):
                break
            rejected = True
            fac = SAFETY * err ** -0.2
            if fac < MIN_FACTOR:
                fac = MIN_FACTOR
            h *= fac

        if np.isnan(err):
            # NaN state cannot recover; report as divergence at the last
            # finite point.
            return DIVERGED, t, x, y, z, h, n_ev, n_st

        t_new = t + h

        if ev_cap > 0 and ((ev_dir <= 0 and y > 0.0 and yn <= 0.0)
                           or (ev_dir >= 0 and y < 0.0 and yn >= 0.0)):
            _fill_dense(kx, ky, kz, q)
            u = _refine_section_root(y, h, q, y, yn)
            ev_t[n_ev] = t + u * h
            ev_s[n_ev, 0] = _dense_component(x, h, q, 0, u)
            ev_s[n_ev, 1] = _dense_component(y, h, q, 4, u)
            ev_s[n_ev, 2] = _dense_component(z, h, q, 8, u)
            ev_d[n_ev] = -1 if y > 0.0 else 1
            n_ev += 1

        if want_steps:
            _fill_dense(kx, ky, kz, q)
            st_t[n_st] = t_new
            st_h[n_st] = h
            st_y[n_st, 0] = xn
            st_y[n_st, 1] = yn
            st_y[n_st, 2] = zn
            for j in range(12):
                st_q[n_st, j] = q[j]
            n_st += 1

        t = t_new
        x = xn
        y = yn
        z = zn
        kx[0] = kx[6]
        ky[0] = ky[6]
        kz[0] = kz[6]

        if err == 0.0:
            fac = MAX_FACTOR
        else:
            fac = SAFETY * err ** -0.2
            if fac > MAX_FACTOR:
                fac = MAX_FACTOR
        if rejected and fac > 1.0:
            fac = 1.0
        h *= fac

        if x * x + y * y + z * z > div_sq:
            return DIVERGED, t, x, y, z, h, n_ev, n_st
        if n_ev >= ev_cap and ev_cap > 0:
            return EVENTS_FULL, t, x, y, z, h, n_ev, n_st
        if want_steps and n_st >= st_cap:
            return STEPS_FULL, t, x, y, z, h, n_ev, n_st


@njit(cache=True, nogil=True)
def fixed_step_endpoint(x, y, z, a2, b, h, n_steps):
    """Classic (non-adaptive) Dormand-Prince steps; returns the endpoint."""
    kx = np.empty(7)
    ky = np.empty(7)
    kz = np.empty(7)
    for _ in range(n_steps):
        kx[0] = y
        ky[0] = z
        kz[0] = x * x * x - a2 * x - y - b * z
        for s in range(1, 7):
            sx = 0.0
            sy = 0.0
            sz = 0.0
            for j in range(s):
                a_sj = _A[s, j]
                sx += a_sj * kx[j]
                sy += a_sj * ky[j]
                sz += a_sj * kz[j]
            xs = x + h * sx
            ys = y + h * sy
            zs = z + h * sz
            kx[s] = ys
            ky[s] = zs
            kz[s] = xs * xs * xs - a2 * xs - ys - b * zs
            if s == 6:
                xn = xs
                yn = ys
                zn = zs
        x = xn
        y = yn
        z = zn
    return x, y, z
