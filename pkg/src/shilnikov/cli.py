"""Command-line front end with deterministic CSV/JSON/SVG output.

Subcommands: equilibria, orbit, scan, cascade, manifold, aclass, feigenbaum.
Exit codes: 0 success (an Aperiodic verdict is data, not failure), 2 config
error, 3 divergence, 4 internal numerical failure.

Config precedence: command-line flags > config file (key=value lines) >
defaults.  The env var CASCADE_SCAN_SEED_TOL overrides the default integrator
tolerances (rel = value, abs = value/100) for CI speed; its use is recorded in
the output header.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .cascade import (ACCUMULATION_INDEX, CascadeRecord, RecordKind,
                      classify_parameter, feigenbaum_accumulation,
                      feigenbaum_delta, feigenbaum_next, run_series, scan,
                      series_defaults)
from .integrate import IntegratorOptions
from .manifold import SweepDirection, sample_aclass, sweep_manifold
from .model import SystemParams, equilibria
from .orbit import (DEFAULT_SEED, ROTATION_CONVENTION, OrbitSearchOptions,
                    Outcome)
from .svgplot import render_svg

_TOL_ENV = "CASCADE_SCAN_SEED_TOL"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_NUMERICAL = 4

_PROJ = {"xz": (0, 2), "xy": (0, 1), "yz": (1, 2)}


class ConfigError(ValueError):
    pass


def fmt(v) -> str:
    """Shortest round-trip decimal capped at 12 significant digits."""
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return ""
    for p in range(1, 13):
        s = f"{v:.{p}g}"
        if float(s) == v:
            return s
    return f"{v:.12g}"


def _json_value(v):
    if v is None:
        return None
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return None if math.isnan(v) else float(fmt(v))
    return v


def _parse_seed(text: str) -> tuple[float, float, float]:
    parts = [float(t) for t in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"seed must be 'x,y,z', got {text!r}")
    return tuple(parts)


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path) as fh:
            for i, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{i}: expected key=value")
                key, _, val = line.partition("=")
                values[key.strip().replace("-", "_")] = val.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    return values


def _merge_config(args: argparse.Namespace, parser: argparse.ArgumentParser):
    """flags > config file > parser defaults."""
    if not getattr(args, "config", None):
        return
    file_vals = _read_config_file(args.config)
    actions = {a.dest: a for a in parser._actions}
    for key, raw in file_vals.items():
        action = actions.get(key)
        if action is None or not hasattr(args, key):
            continue
        if getattr(args, key) != action.default:
            continue          # explicit flag wins
        try:
            setattr(args, key, action.type(raw) if action.type else raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config value {key}={raw!r}: {exc}") from None


def _integrator_options(args) -> tuple[IntegratorOptions, bool]:
    rel = args.rel_tol
    ab = args.abs_tol
    env_used = False
    env = os.environ.get(_TOL_ENV)
    if env and args.rel_tol is None and args.abs_tol is None:
        try:
            rel = float(env)
        except ValueError:
            raise ConfigError(f"{_TOL_ENV}={env!r} is not a number") from None
        ab = rel * 1e-2
        env_used = True
    defaults = IntegratorOptions()
    try:
        return IntegratorOptions(
            rel_tol=defaults.rel_tol if rel is None else rel,
            abs_tol=defaults.abs_tol if ab is None else ab,
            max_step=args.max_step or defaults.max_step,
            max_time=np.inf,
            divergence_radius=args.divergence_radius
            or defaults.divergence_radius), env_used
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _search_options(args) -> OrbitSearchOptions:
    d = OrbitSearchOptions()
    try:
        return OrbitSearchOptions(
            transient_time=args.transient_time or d.transient_time,
            match_tol=args.match_tol or d.match_tol,
            max_rotation=args.max_rotation or d.max_rotation,
            observation_events=args.observation_events or d.observation_events)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _header_lines(args, env_used: bool) -> list[str]:
    pairs = []
    for key in sorted(vars(args)):
        if key in ("func", "parser"):
            continue
        val = getattr(args, key)
        if val is None:
            continue
        pairs.append(f"{key}={val}")
    lines = [f"# shilnikov {__version__}",
             f"# config: {' '.join(pairs)}",
             f"# rotation convention: {ROTATION_CONVENTION}"]
    if env_used:
        lines.append(f"# {_TOL_ENV} override in effect")
    return lines


def _emit(args, env_used, columns, rows, json_extra=None):
    """Write CSV (default) or JSON with the standard header metadata."""
    fmt_name = args.format
    if fmt_name == "json":
        payload = {
            "version": __version__,
            "rotation_convention": ROTATION_CONVENTION,
            "rows": [
                {c: _json_value(v) for c, v in zip(columns, row)}
                for row in rows
            ],
        }
        if env_used:
            payload["tolerance_env_override"] = True
        if json_extra:
            payload.update(json_extra)
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        lines = _header_lines(args, env_used)
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(fmt(v) if not isinstance(v, str) else v
                                  for v in row))
        text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_svg(path, items, xlabel, ylabel, title):
    with open(path, "w") as fh:
        fh.write(render_svg(items, xlabel, ylabel, title))


def _projection_pair(args):
    try:
        return _PROJ[args.projection]
    except KeyError:
        raise ConfigError(f"projection must be one of {sorted(_PROJ)}, got "
                          f"{args.projection!r}") from None


def _params(args) -> SystemParams:
    try:
        return SystemParams(a=args.a, b=args.b)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def cmd_equilibria(args) -> int:
    opts, env_used = _integrator_options(args)
    p = _params(args)
    columns = ["name", "x", "y", "z", "lam1_re", "lam1_im", "lam2_re",
               "lam2_im", "lam3_re", "lam3_im", "kind"]
    rows = []
    for eq in equilibria(p):
        ev = eq.eigenvalues
        rows.append([eq.name, eq.point[0], eq.point[1], eq.point[2],
                     ev[0].real, ev[0].imag, ev[1].real, ev[1].imag,
                     ev[2].real, ev[2].imag, eq.kind.value])
    _emit(args, env_used, columns, rows)
    return EXIT_OK


def cmd_orbit(args) -> int:
    opts, env_used = _integrator_options(args)
    search = _search_options(args)
    p = _params(args)
    seed = _parse_seed(args.seed)
    from .orbit import detect_orbit
    verdict = detect_orbit(seed, p, search, opts)
    columns = ["b", "outcome", "rotation", "period", "symmetry", "residual"]
    if verdict.outcome is Outcome.PERIODIC:
        o = verdict.orbit
        rows = [[p.b, "periodic", o.rotation, o.period, o.symmetry.value,
                 o.residual]]
    else:
        rows = [[p.b, verdict.outcome.value, None, None, None, None]]
    _emit(args, env_used, columns, rows, json_extra={
        "max_rotation_searched": verdict.max_rotation_searched,
        "escalated": verdict.escalated})
    if args.svg:
        if verdict.outcome is not Outcome.PERIODIC:
            raise ConfigError("no loop to draw: verdict is not periodic")
        loop = verdict.orbit.loop.states
        _write_svg(args.svg,
                   [("line", loop[:, [0, 2]])] if args.projection == "xz"
                   else [("line", loop[:, list(_projection_pair(args))])],
                   *{"xz": ("x", "z"), "xy": ("x", "y"),
                     "yz": ("y", "z")}[args.projection],
                   f"closed orbit, b={fmt(p.b)}")
    if verdict.outcome is Outcome.DIVERGED:
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_scan(args) -> int:
    opts, env_used = _integrator_options(args)
    search = _search_options(args)
    if args.b_start is None or args.b_end is None or args.step is None:
        raise ConfigError("scan needs --b-start, --b-end and --step")
    if not (args.b_start >= args.b_end > 0.0) or args.step <= 0.0:
        raise ConfigError("need b_start >= b_end > 0 and step > 0")
    rows_raw = scan(args.b_start, args.b_end, args.step, search, opts,
                    jobs=args.jobs)
    columns = ["b", "outcome", "rotation", "period", "symmetry", "residual"]
    rows = [[r.b, r.outcome, r.rotation, r.period, r.symmetry, r.residual]
            for r in rows_raw]
    _emit(args, env_used, columns, rows)
    if args.svg:
        pts = np.array([[r.b, r.rotation] for r in rows_raw
                        if r.rotation is not None], dtype=float)
        _write_svg(args.svg, [("points", pts.reshape(-1, 2))], "b",
                   "rotation number", "rotation number vs b")
    return EXIT_OK


def cmd_cascade(args) -> int:
    opts, env_used = _integrator_options(args)
    search = _search_options(args)
    if args.character not in (1, 13, 3):
        raise ConfigError("character must be one of 1, 13, 3")
    up_d, hint_d, tol_d = series_defaults(args.character)
    records = run_series(
        args.character,
        up_d if args.b_upper is None else args.b_upper,
        hint_d if args.b_lower_hint is None else args.b_lower_hint,
        args.depth,
        tol_d if args.tol_b is None else args.tol_b,
        search, opts)
    columns = ["character", "n", "b", "kind", "bracket_width"]
    rows = [[r.character, r.index, r.b_value, r.kind.value, r.bracket_width]
            for r in records]
    _emit(args, env_used, columns, rows,
          json_extra={"accumulation_index": ACCUMULATION_INDEX})
    return EXIT_OK


def cmd_manifold(args) -> int:
    opts, env_used = _integrator_options(args)
    p = _params(args)
    names = {"p0": 0, "p1": 1, "p2": 2}
    if args.eq not in names:
        raise ConfigError(f"--eq must be one of {sorted(names)}")
    try:
        direction = SweepDirection(args.dir)
    except ValueError:
        raise ConfigError("--dir must be 'forward' or 'backward'") from None
    eq = equilibria(p)[names[args.eq]]
    try:
        sweep = sweep_manifold(eq, direction, seed_radius=args.seed_radius,
                               seed_count=args.seed_count,
                               horizon=args.horizon, opts=opts)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    columns = ["curve_id", "t", "x", "y", "z"]
    rows = []
    for cid, curve in enumerate(sweep.curves):
        stride = max(1, len(curve.t) // args.max_samples_per_curve)
        for t, s in zip(curve.t[::stride], curve.states[::stride]):
            rows.append([cid, t, s[0], s[1], s[2]])
    _emit(args, env_used, columns, rows)
    if any(sweep.diverged) and args.output:
        with open(args.output + ".diagnostics.txt", "w") as fh:
            for cid, div in enumerate(sweep.diverged):
                if div:
                    fh.write(f"curve {cid}: reached divergence radius\n")
    if args.svg:
        i, j = _projection_pair(args)
        items = [("line", c.states[:, [i, j]]) for c in sweep.curves]
        _write_svg(args.svg, items, "xyz"[i], "xyz"[j],
                   f"{args.eq} {direction.value} sweep, b={fmt(p.b)}")
    return EXIT_OK


def cmd_aclass(args) -> int:
    opts, env_used = _integrator_options(args)
    p = _params(args)
    if not args.transient_cut < args.total_time:
        raise ConfigError("need transient_cut < total_time")
    sample = sample_aclass(p, transient_cut=args.transient_cut,
                           total_time=args.total_time,
                           seed_count=args.seeds, opts=opts)
    stride = max(1, len(sample.points) // args.max_points)
    pts = sample.points[::stride]
    columns = ["x", "y", "z"]
    rows = [[q[0], q[1], q[2]] for q in pts]
    _emit(args, env_used, columns, rows)
    if sample.diverged_seeds and args.output:
        with open(args.output + ".diagnostics.txt", "w") as fh:
            for sid in sample.diverged_seeds:
                fh.write(f"seed {sid}: reached divergence radius\n")
    if args.svg:
        i, j = _projection_pair(args)
        _write_svg(args.svg, [("points", pts[:, [i, j]])], "xyz"[i],
                   "xyz"[j], f"attracting set, b={fmt(p.b)}")
    return EXIT_OK


def cmd_feigenbaum(args) -> int:
    vals = args.values
    try:
        if args.op == "next":
            if len(vals) != 2:
                raise ConfigError("feigenbaum next needs 2 values")
            out = feigenbaum_next(vals[0], vals[1])
        elif args.op == "accum":
            if len(vals) != 2:
                raise ConfigError("feigenbaum accum needs 2 values")
            out = feigenbaum_accumulation(vals[0], vals[1])
        else:
            if len(vals) != 3:
                raise ConfigError("feigenbaum delta needs 3 values")
            out = feigenbaum_delta(vals[0], vals[1], vals[2])
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc)) from None
    sys.stdout.write(fmt(out) + "\n")
    return EXIT_OK


def _add_common(sp, *, orbit_opts=False):
    sp.add_argument("--config", help="key=value config file")
    sp.add_argument("--a", type=float, default=1.0)
    sp.add_argument("--rel-tol", type=float, default=None)
    sp.add_argument("--abs-tol", type=float, default=None)
    sp.add_argument("--max-step", type=float, default=None)
    sp.add_argument("--divergence-radius", type=float, default=None)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--output", default=None, help="file path (default stdout)")
    sp.add_argument("--svg", default=None, help="also write an SVG plot here")
    sp.add_argument("--projection", choices=sorted(_PROJ), default="xz")
    if orbit_opts:
        sp.add_argument("--seed", default=f"{DEFAULT_SEED[0]},"
                        f"{DEFAULT_SEED[1]},{DEFAULT_SEED[2]}")
        sp.add_argument("--transient-time", type=float, default=None)
        sp.add_argument("--match-tol", type=float, default=None)
        sp.add_argument("--max-rotation", type=int, default=None)
        sp.add_argument("--observation-events", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="shilnikov",
        description="Limit orbits, period-doubling cascades and invariant "
                    "manifolds of the cubic saddle-focus flow")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("equilibria", help="equilibrium points and spectra")
    _add_common(sp)
    sp.add_argument("--b", type=float, required=True)
    sp.set_defaults(func=cmd_equilibria, parser=sp)

    sp = sub.add_parser("orbit", help="attractor verdict at one parameter")
    _add_common(sp, orbit_opts=True)
    sp.add_argument("--b", type=float, required=True)
    sp.set_defaults(func=cmd_orbit, parser=sp)

    sp = sub.add_parser("scan", help="descending bifurcation sweep")
    _add_common(sp, orbit_opts=True)
    sp.add_argument("--b-start", type=float, default=None)
    sp.add_argument("--b-end", type=float, default=None)
    sp.add_argument("--step", type=float, default=None)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_scan, parser=sp)

    sp = sub.add_parser("cascade", help="period-doubling series locator")
    _add_common(sp, orbit_opts=True)
    sp.add_argument("--character", type=int, required=True)
    sp.add_argument("--depth", type=int, default=0)
    sp.add_argument("--b-upper", type=float, default=None)
    sp.add_argument("--b-lower-hint", type=float, default=None)
    sp.add_argument("--tol-b", type=float, default=None)
    sp.set_defaults(func=cmd_cascade, parser=sp)

    sp = sub.add_parser("manifold", help="invariant-manifold sweep")
    _add_common(sp)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--eq", required=True, help="p0, p1 or p2")
    sp.add_argument("--dir", required=True, help="forward or backward")
    sp.add_argument("--seed-count", type=int, default=72)
    sp.add_argument("--seed-radius", type=float, default=1e-4)
    sp.add_argument("--horizon", type=float, default=60.0)
    sp.add_argument("--max-samples-per-curve", type=int, default=2000)
    sp.set_defaults(func=cmd_manifold, parser=sp)

    sp = sub.add_parser("aclass", help="attracting-set point cloud")
    _add_common(sp)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--transient-cut", type=float, default=3000.0)
    sp.add_argument("--total-time", type=float, default=6000.0)
    sp.add_argument("--seeds", type=int, default=8)
    sp.add_argument("--max-points", type=int, default=200000)
    sp.set_defaults(func=cmd_aclass, parser=sp)

    sp = sub.add_parser("feigenbaum", help="cascade arithmetic")
    sp.add_argument("op", choices=("next", "accum", "delta"))
    sp.add_argument("values", type=float, nargs="+")
    sp.set_defaults(func=cmd_feigenbaum, parser=sp)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if hasattr(args, "config"):
            _merge_config(args, args.parser)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:    # numerical failures map to a dedicated code
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
