"""Adaptive Runge-Kutta integration with dense output and section events.

A hand-rolled Dormand-Prince 5(4) pair drives everything: the smooth cubic
field is non-stiff, but separating bifurcation values ~1e-5 apart needs local
error far below the default plotting accuracy, so defaults are tight
(rel 1e-10 / abs 1e-12).  Dense output is the free 4th-order interpolant of
the pair; events are bracketed zero crossings refined on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _core

__all__ = [
    "IntegratorOptions",
    "Trajectory",
    "Diverged",
    "SectionEvent",
    "SectionSpec",
    "StepSizeUnderflow",
    "x_peak_section",
    "integrate",
    "integrate_with_events",
    "fixed_step_endpoint",
]

_EVENT_CHUNK = 4096
_STEP_CHUNK = 65536


class StepSizeUnderflow(RuntimeError):
    """Raised when the controller would need a step below 1e-14."""


@dataclass(frozen=True)
class IntegratorOptions:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 0.1
    max_time: float = 1000.0
    divergence_radius: float = 1e3

    def __post_init__(self):
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise ValueError("tolerances must be positive")
        if not self.max_step > 0.0:
            raise ValueError("max_step must be positive")
        if not self.divergence_radius > 1.0:
            raise ValueError("divergence_radius must exceed 1")
        if not self.max_time > 0.0:
            raise ValueError("max_time must be positive")


class Trajectory:
    """Accepted-step samples plus the piecewise quartic dense interpolant."""

    def __init__(self, t, states, h, coeffs):
        self.t = np.asarray(t)
        self.states = np.asarray(states)
        self.h = np.asarray(h)
        self.coeffs = np.asarray(coeffs)   # (n_steps, 12) row-major 3x4

    @property
    def t0(self) -> float:
        return float(self.t[0])

    @property
    def t1(self) -> float:
        return float(self.t[-1])

    @property
    def samples(self):
        """The (t, state) node sequence as parallel arrays."""
        return self.t, self.states

    def __call__(self, t):
        """Evaluate the dense interpolant at scalar or array times."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tq = np.atleast_1d(t)
        if len(self.h) == 0:
            out = np.broadcast_to(self.states[0], (len(tq), 3)).copy()
            return out[0] if scalar else out
        slack = 1e-9 * (1.0 + abs(self.t[-1]))
        if tq.size and (tq.min() < self.t[0] - slack or tq.max() > self.t[-1] + slack):
            raise ValueError("query time outside the integrated span")
        idx = np.clip(np.searchsorted(self.t, tq, side="right") - 1, 0, len(self.h) - 1)
        u = (tq - self.t[idx]) / self.h[idx]
        u = np.clip(u, 0.0, 1.0)
        q = self.coeffs[idx].reshape(-1, 3, 4)
        acc = q[:, :, 3]
        for j in (2, 1, 0):
            acc = acc * u[:, None] + q[:, :, j]
        out = self.states[idx] + (self.h[idx] * u)[:, None] * acc
        return out[0] if scalar else out


@dataclass(frozen=True)
class Diverged:
    """Exit record for a trajectory that left the divergence radius."""

    t: float
    state: np.ndarray
    trajectory: Trajectory | None = None


@dataclass(frozen=True)
class SectionEvent:
    t: float
    state: np.ndarray
    direction: int    # sign of dg/dt at the crossing


@dataclass(frozen=True)
class SectionSpec:
    """Scalar section g with a crossing-direction filter and optional guard.

    g = None selects the built-in fast section g(s) = y, whose decreasing
    crossings are the local maxima of x(t).
    """

    g: Callable[[np.ndarray], float] | None = None
    direction: int = -1          # -1 decreasing, +1 increasing, 0 both
    guard: Callable[[np.ndarray], bool] | None = None


def x_peak_section(guard=None) -> SectionSpec:
    """Section whose events are the local maxima of x(t): y = 0, dy/dt < 0."""
    return SectionSpec(g=None, direction=-1, guard=guard)


def _raw_drive(state, p, t0, t_end, opts, *, backward=False, ev_dir=None,
               max_events=0, store=False, h0=0.0):
    """Chunked driver around the jitted core.

    Returns (status, t, state, h_next, events(t, s, d), steps(t, h, y, q)).
    """
    x, y, z = float(state[0]), float(state[1]), float(state[2])
    t = float(t0)
    a2 = p.a * p.a
    sign = -1.0 if backward else 1.0
    div_sq = opts.divergence_radius ** 2
    h = h0

    want_ev = max_events > 0
    ev_t_parts, ev_s_parts, ev_d_parts = [], [], []
    st_t_parts, st_h_parts, st_y_parts, st_q_parts = [], [], [], []
    n_ev_total = 0

    empty_f = np.empty(0)
    empty_s = np.empty((0, 3))
    empty_d = np.empty(0, dtype=np.int64)
    empty_q = np.empty((0, 12))

    while True:
        ev_cap = min(_EVENT_CHUNK, max_events - n_ev_total) if want_ev else 0
        ev_t = np.empty(ev_cap) if ev_cap else empty_f
        ev_s = np.empty((ev_cap, 3)) if ev_cap else empty_s
        ev_d = np.empty(ev_cap, dtype=np.int64) if ev_cap else empty_d
        st_cap = _STEP_CHUNK if store else 0
        st_t = np.empty(st_cap) if store else empty_f
        st_h = np.empty(st_cap) if store else empty_f
        st_y = np.empty((st_cap, 3)) if store else empty_s
        st_q = np.empty((st_cap, 12)) if store else empty_q

        status, t, x, y, z, h, n_ev, n_st = _core.drive(
            x, y, z, t, t_end, a2, p.b, sign,
            opts.rel_tol, opts.abs_tol, opts.max_step, h,
            div_sq, 0 if ev_dir is None else ev_dir,
            ev_t, ev_s, ev_d, store, st_t, st_h, st_y, st_q)

        if n_ev:
            ev_t_parts.append(ev_t[:n_ev].copy())
            ev_s_parts.append(ev_s[:n_ev].copy())
            ev_d_parts.append(ev_d[:n_ev].copy())
            n_ev_total += n_ev
        if n_st:
            st_t_parts.append(st_t[:n_st].copy())
            st_h_parts.append(st_h[:n_st].copy())
            st_y_parts.append(st_y[:n_st].copy())
            st_q_parts.append(st_q[:n_st].copy())

        if status == _core.STEPS_FULL:
            continue
        if status == _core.EVENTS_FULL and n_ev_total < max_events:
            continue
        break

    def cat(parts, empty):
        return np.concatenate(parts) if parts else empty

    events = (cat(ev_t_parts, empty_f), cat(ev_s_parts, empty_s),
              cat(ev_d_parts, empty_d))
    steps = (cat(st_t_parts, empty_f), cat(st_h_parts, empty_f),
             cat(st_y_parts, empty_s), cat(st_q_parts, empty_q))
    return status, t, np.array([x, y, z]), h, events, steps


def _build_trajectory(s0, t0, steps) -> Trajectory:
    st_t, st_h, st_y, st_q = steps
    t = np.concatenate([[t0], st_t])
    states = np.vstack([np.asarray(s0, dtype=float)[None, :], st_y])
    return Trajectory(t, states, st_h, st_q)


def integrate(s0, p, opts: IntegratorOptions, *, backward=False):
    """Integrate over [0, max_time]; Diverged is an outcome, not an error.

    backward=True integrates the negated field (stable-manifold sweeps); the
    returned times are elapsed backward time, still increasing.
    """
    s0 = np.asarray(s0, dtype=float)
    if not np.all(np.isfinite(s0)):
        raise ValueError("initial state must be finite")
    status, t, s_end, _, _, steps = _raw_drive(
        s0, p, 0.0, opts.max_time, opts, backward=backward, store=True)
    traj = _build_trajectory(s0, 0.0, steps)
    if status == _core.DIVERGED:
        return Diverged(t=t, state=s_end, trajectory=traj)
    if status == _core.STEP_UNDERFLOW:
        raise StepSizeUnderflow(
            f"step size fell below {_core.MIN_STEP:g} at t={t:.6g}")
    return traj


def _fast_y_events(events, section):
    ev_t, ev_s, ev_d = events
    out = []
    for i in range(len(ev_t)):
        if section.direction and ev_d[i] != section.direction:
            continue
        if section.guard is not None and not section.guard(ev_s[i]):
            continue
        out.append(SectionEvent(t=float(ev_t[i]), state=ev_s[i].copy(),
                                direction=int(ev_d[i])))
    return out


def _generic_events(traj: Trajectory, section: SectionSpec):
    g_nodes = np.array([section.g(s) for s in traj.states])
    out = []
    for i in range(len(traj.h)):
        g0, g1 = g_nodes[i], g_nodes[i + 1]
        if g0 == 0.0:
            continue
        if not ((g0 > 0.0 and g1 <= 0.0) or (g0 < 0.0 and g1 >= 0.0)):
            continue
        direction = -1 if g0 > 0.0 else 1
        if section.direction and direction != section.direction:
            continue
        ta, tb = traj.t[i], traj.t[i + 1]
        ga, gb = g0, g1
        for _ in range(30):
            tm = 0.5 * (ta + tb)
            gm = section.g(traj(tm))
            if (ga > 0.0) == (gm > 0.0):
                ta, ga = tm, gm
            else:
                tb, gb = tm, gm
        t_prev, g_prev, t_cur, g_cur = ta, ga, tb, gb
        for _ in range(30):
            if g_cur == g_prev or g_cur == 0.0:
                break
            t_next = t_cur - g_cur * (t_cur - t_prev) / (g_cur - g_prev)
            if not (traj.t[i] <= t_next <= traj.t[i + 1]):
                break
            t_prev, g_prev = t_cur, g_cur
            t_cur = t_next
            g_cur = section.g(traj(t_next))
        s_ev = traj(t_cur)
        if abs(section.g(s_ev)) > 1e-10 * (1.0 + np.linalg.norm(s_ev)):
            continue   # grazing contact, not a transversal crossing
        if section.guard is not None and not section.guard(s_ev):
            continue
        out.append(SectionEvent(t=float(t_cur), state=s_ev, direction=direction))
    return out


def integrate_with_events(s0, p, section: SectionSpec, opts: IntegratorOptions,
                          *, backward=False):
    """Integrate and report refined section crossings along the way.

    Returns (Trajectory | Diverged, [SectionEvent]).  Crossings are sign
    changes of g between accepted steps, refined by bisection-then-secant on
    the dense output to |g| <= 1e-10 * (1 + |s|); grazing contacts are not
    events.
    """
    s0 = np.asarray(s0, dtype=float)
    if section.g is None:
        status, t, s_end, _, events, steps = _raw_drive(
            s0, p, 0.0, opts.max_time, opts, backward=backward,
            ev_dir=section.direction, max_events=2 ** 62, store=True)
        traj = _build_trajectory(s0, 0.0, steps)
        evs = _fast_y_events(events, section)
    else:
        res = integrate(s0, p, opts, backward=backward)
        traj = res.trajectory if isinstance(res, Diverged) else res
        evs = _generic_events(traj, section)
        status = _core.DIVERGED if isinstance(res, Diverged) else _core.REACHED_END
        if isinstance(res, Diverged):
            return res, evs
        return traj, evs
    if status == _core.DIVERGED:
        return Diverged(t=t, state=s_end, trajectory=traj), evs
    if status == _core.STEP_UNDERFLOW:
        raise StepSizeUnderflow(
            f"step size fell below {_core.MIN_STEP:g} at t={t:.6g}")
    return traj, evs


def fixed_step_endpoint(s0, p, h: float, n_steps: int) -> np.ndarray:
    """Non-adaptive stepping, used for observed-order tests."""
    x, y, z = _core.fixed_step_endpoint(
        float(s0[0]), float(s0[1]), float(s0[2]), p.a * p.a, p.b, h, n_steps)
    return np.array([x, y, z])
