import numpy as np
import pytest

from shilnikov import (Diverged, IntegratorOptions, SectionSpec, SystemParams,
                       Trajectory, detect_orbit, fixed_step_endpoint,
                       integrate, integrate_with_events, x_peak_section)


def test_options_validation():
    with pytest.raises(ValueError):
        IntegratorOptions(rel_tol=0.0)
    with pytest.raises(ValueError):
        IntegratorOptions(max_step=-1.0)
    with pytest.raises(ValueError):
        IntegratorOptions(divergence_radius=0.5)


def test_origin_stays_put():
    traj = integrate((0, 0, 0), SystemParams(1.0, 0.315),
                     IntegratorOptions(max_time=50.0))
    assert np.abs(traj.states).max() == 0.0


def test_bounded_in_the_single_cycle_regime():
    # Orbits are attracted to a small limit cycle here; radius 10 never trips.
    res = integrate((0.1, 0, 0), SystemParams(1.0, 0.5),
                    IntegratorOptions(max_time=2000.0, divergence_radius=10.0))
    assert isinstance(res, Trajectory)
    assert np.linalg.norm(res.states, axis=1).max() < 10.0


def test_divergence_is_an_outcome():
    res = integrate((0.1, 0, 0), SystemParams(1.0, 0.25),
                    IntegratorOptions(max_time=5000.0))
    assert isinstance(res, Diverged)
    assert np.linalg.norm(res.state) > 1e3
    assert res.trajectory.t[-1] <= res.t + 1e-9


def test_dense_output_matches_nodes():
    traj = integrate((0.1, 0, 0), SystemParams(1.0, 0.4),
                     IntegratorOptions(max_time=50.0))
    idx = np.arange(0, len(traj.t), 37)
    assert np.abs(traj(traj.t[idx]) - traj.states[idx]).max() < 1e-12


def test_dense_output_is_locally_accurate():
    opts = IntegratorOptions(max_time=20.0)
    traj = integrate((0.1, 0, 0), SystemParams(1.0, 0.4), opts)
    fine = integrate((0.1, 0, 0), SystemParams(1.0, 0.4),
                     IntegratorOptions(max_time=20.0, rel_tol=1e-13,
                                       abs_tol=1e-15))
    ts = np.linspace(0.5, 19.5, 101)
    assert np.abs(traj(ts) - fine(ts)).max() < 1e-7


def test_tolerance_halving_self_convergence():
    p = SystemParams(1.0, 0.4)
    opts = IntegratorOptions(max_time=100.0, rel_tol=1e-10, abs_tol=1e-12)
    half = IntegratorOptions(max_time=100.0, rel_tol=5e-11, abs_tol=5e-13)
    e1 = integrate((0.1, 0, 0), p, opts).states[-1]
    e2 = integrate((0.1, 0, 0), p, half).states[-1]
    assert np.abs(e1 - e2).max() < 10.0 * opts.rel_tol


def test_fixed_step_observed_order():
    p = SystemParams(1.0, 0.4)
    ref = integrate((0.1, 0, 0), p,
                    IntegratorOptions(max_time=20.0, rel_tol=1e-13,
                                      abs_tol=1e-15)).states[-1]
    errs = []
    for h in (0.04, 0.02, 0.01):
        n = int(round(20.0 / h))
        errs.append(np.abs(fixed_step_endpoint((0.1, 0, 0), p, h, n)
                           - ref).max())
    orders = [np.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
    assert min(orders) >= 4.5


def test_equivariance_under_point_reflection():
    # Each field component is odd, so negating the seed negates every
    # accepted step bit-for-bit; assert far below the 10x-tolerance contract.
    p = SystemParams(1.0, 0.4)
    opts = IntegratorOptions(max_time=100.0)
    a = integrate((0.1, 0, 0), p, opts)
    b = integrate((-0.1, 0, 0), p, opts)
    assert len(a.t) == len(b.t)
    assert np.abs(a.states + b.states).max() < 10.0 * opts.rel_tol


def test_events_once_per_period_on_the_single_cycle():
    p = SystemParams(1.0, 0.4892)
    verdict = detect_orbit((0.1, 0, 0), p)
    orbit = verdict.orbit
    seed = orbit.loop.states[0]
    horizon = 10.0 * orbit.period + 0.5 * orbit.period
    traj, evs = integrate_with_events(
        seed, p, x_peak_section(guard=lambda s: s[0] > 0.0),
        IntegratorOptions(max_time=horizon))
    assert len(evs) == 10
    gaps = np.diff([e.t for e in evs])
    assert np.abs(gaps - orbit.period).max() < 1e-6


def test_events_refined_to_tolerance():
    p = SystemParams(1.0, 0.4)
    traj, evs = integrate_with_events((0.1, 0, 0), p, x_peak_section(),
                                      IntegratorOptions(max_time=200.0))
    assert evs
    for e in evs:
        assert abs(e.state[1]) <= 1e-10 * (1.0 + np.linalg.norm(e.state))
        assert e.direction == -1


def test_events_direction_filter_and_generic_section():
    p = SystemParams(1.0, 0.4)
    opts = IntegratorOptions(max_time=200.0)
    _, down = integrate_with_events((0.1, 0, 0), p, x_peak_section(), opts)
    _, both = integrate_with_events((0.1, 0, 0), p,
                                    SectionSpec(g=None, direction=0), opts)
    assert len(both) > len(down)
    # generic path: same section through a Python callable
    _, gen = integrate_with_events((0.1, 0, 0), p,
                                   SectionSpec(g=lambda s: s[1], direction=-1),
                                   opts)
    assert len(gen) == len(down)
    assert np.abs(np.array([e.t for e in gen])
                  - np.array([e.t for e in down])).max() < 1e-9


def test_no_events_on_the_origin():
    traj, evs = integrate_with_events((0, 0, 0), SystemParams(1.0, 0.4),
                                      x_peak_section(),
                                      IntegratorOptions(max_time=50.0))
    assert evs == []


def test_event_times_stable_under_tolerance_tightening():
    p = SystemParams(1.0, 0.3991)
    seed = detect_orbit((0.1, 0, 0), p).orbit.loop.states[0]
    times = []
    for rt, at in ((1e-10, 1e-12), (1e-12, 1e-14)):
        _, evs = integrate_with_events(
            seed, p, x_peak_section(),
            IntegratorOptions(max_time=330.0, rel_tol=rt, abs_tol=at))
        times.append(np.array([e.t for e in evs[:50]]))
    assert len(times[0]) >= 50 and len(times[1]) >= 50
    assert np.abs(times[0][:50] - times[1][:50]).max() < 1e-6


def test_backward_integration_leaves_stable_plane():
    # Backward time turns the stable plane of p2 unstable: the sweep exits
    # through the divergence radius.
    from shilnikov import equilibria
    eq = equilibria(SystemParams(1.0, 0.315))[2]
    e1 = eq.plane_basis[0]
    res = integrate(eq.point + 1e-4 * e1, SystemParams(1.0, 0.315),
                    IntegratorOptions(max_time=200.0), backward=True)
    assert isinstance(res, Diverged)
