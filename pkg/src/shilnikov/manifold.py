"""Invariant-manifold sweeps and sampling of the nontrivial attracting set.

Two-dimensional manifolds are grown as bundles of integral curves seeded on a
small circle in the local eigenplane (backward time for stable manifolds of
the outer equilibria, forward time for the unstable plane of the origin).
The attracting set is represented as the pooled post-transient point cloud of
a fan of unstable-plane seeds: its closure is the omega-limit set of the 2D
unstable manifold of the origin, and meshing is deliberately avoided since
the set may be fractal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .integrate import Diverged, IntegratorOptions, Trajectory, integrate, _raw_drive
from .model import Equilibrium, EquilibriumKind, SystemParams

__all__ = [
    "SweepDirection",
    "ManifoldSweep",
    "AClassSample",
    "sweep_manifold",
    "sample_aclass",
]


class SweepDirection(enum.Enum):
    FORWARD = "forward"      # unstable manifold (origin type)
    BACKWARD = "backward"    # stable manifold (outer pair type)


@dataclass(frozen=True)
class ManifoldSweep:
    equilibrium: Equilibrium
    time_direction: SweepDirection
    curves: list[Trajectory]
    seed_angles: np.ndarray
    seed_radius: float
    horizon: float
    diverged: list[bool] = field(default_factory=list)


@dataclass(frozen=True)
class AClassSample:
    points: np.ndarray          # (n, 3) pooled post-transient samples
    b: float
    transient_cut: float
    total_time: float
    seed_count: int
    diverged_seeds: list[int] = field(default_factory=list)


def _seed_circle(eq: Equilibrium, radius: float, count: int) -> tuple[np.ndarray, np.ndarray]:
    angles = 2.0 * np.pi * np.arange(count) / count
    e1, e2 = eq.plane_basis
    offs = radius * (np.cos(angles)[:, None] * e1[None, :]
                     + np.sin(angles)[:, None] * e2[None, :])
    if count % 2 == 0:
        # Exact antipodal pairs, so the field's odd symmetry maps the sweep of
        # one outer equilibrium onto its mirror bit-for-bit.
        offs[count // 2:] = -offs[:count // 2]
    return angles, eq.point[None, :] + offs


def sweep_manifold(eq: Equilibrium, direction: SweepDirection,
                   seed_radius: float = 1e-4, seed_count: int = 72,
                   horizon: float = 60.0,
                   opts: IntegratorOptions | None = None) -> ManifoldSweep:
    """Expand a 2D invariant manifold as integral curves of eigenplane seeds.

    Backward sweeps require the 2D-stable (outer) equilibrium type, forward
    sweeps the 2D-unstable (origin) type; curves are ordered by seed angle and
    stop at the horizon or the divergence radius (the generic backward exit).
    """
    if direction is SweepDirection.BACKWARD:
        if eq.kind is not EquilibriumKind.SADDLE_FOCUS_2D_STABLE:
            raise ValueError("backward sweeps expand 2D stable manifolds; "
                             f"equilibrium {eq.name} is {eq.kind.value}")
    elif eq.kind is not EquilibriumKind.SADDLE_FOCUS_1D_STABLE:
        raise ValueError("forward sweeps expand the 2D unstable plane; "
                         f"equilibrium {eq.name} is {eq.kind.value}")
    if eq.plane_basis is None:
        raise ValueError("equilibrium carries no eigenplane basis")

    params = getattr(eq, "params", None)
    if params is None:
        raise ValueError("equilibrium is not bound to system parameters")
    base = opts or IntegratorOptions()
    run_opts = IntegratorOptions(rel_tol=base.rel_tol, abs_tol=base.abs_tol,
                                 max_step=base.max_step, max_time=horizon,
                                 divergence_radius=base.divergence_radius)
    angles, seeds = _seed_circle(eq, seed_radius, seed_count)
    curves = []
    diverged = []
    backward = direction is SweepDirection.BACKWARD
    for seed in seeds:
        res = integrate(seed, params, run_opts, backward=backward)
        if isinstance(res, Diverged):
            curves.append(res.trajectory)
            diverged.append(True)
        else:
            curves.append(res)
            diverged.append(False)
    return ManifoldSweep(equilibrium=eq, time_direction=direction,
                         curves=curves, seed_angles=angles,
                         seed_radius=seed_radius, horizon=horizon,
                         diverged=diverged)


def sample_aclass(p: SystemParams, transient_cut: float = 3000.0,
                  total_time: float = 6000.0, seed_count: int = 8,
                  seed_radius: float = 1e-4,
                  opts: IntegratorOptions | None = None) -> AClassSample:
    """Pooled post-transient samples of unstable-plane seeds of the origin.

    Seeds that leave the divergence radius are reported per seed; the
    remaining trajectories still contribute to the pool.
    """
    if not transient_cut < total_time:
        raise ValueError("need transient_cut < total_time")
    from .model import equilibria
    p0 = equilibria(p)[0]
    if p0.kind is not EquilibriumKind.SADDLE_FOCUS_1D_STABLE:
        raise ValueError("origin is not of the 1D-stable saddle-focus type "
                         "at these parameters")
    base = opts or IntegratorOptions()
    _, seeds = _seed_circle(p0, seed_radius, seed_count)
    clouds = []
    diverged_seeds = []
    for i, seed in enumerate(seeds):
        status, t, s, _, _, _ = _raw_drive(seed, p, 0.0, transient_cut, base,
                                           store=False)
        if status != _core.REACHED_END:
            diverged_seeds.append(i)
            continue
        status, t, s, _, _, steps = _raw_drive(s, p, t, total_time, base,
                                               store=True)
        if steps[0].size:
            clouds.append(steps[2])
        if status != _core.REACHED_END:
            diverged_seeds.append(i)
    points = np.vstack(clouds) if clouds else np.empty((0, 3))
    return AClassSample(points=points, b=p.b, transient_cut=transient_cut,
                        total_time=total_time, seed_count=seed_count,
                        diverged_seeds=diverged_seeds)
