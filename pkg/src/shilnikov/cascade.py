"""Parameter sweeps, period-doubling location and Feigenbaum extrapolation.

Critical values are located by bisection on the integer rotation number, with
the doubling index n of a series of character c counted so that rotation
c * 2^n holds between the n-th and (n-1)-th critical values; for character 1
the n = 0 event is the symmetry-breaking split of the single symmetric cycle
(rotation stays 1), so its locator bisects on the symmetry class instead.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from .integrate import IntegratorOptions
from .model import SystemParams
from .orbit import (DEFAULT_SEED, AttractorVerdict, OrbitSearchOptions,
                    Outcome, Symmetry, detect_orbit)

__all__ = [
    "FEIGENBAUM_DELTA",
    "ACCUMULATION_INDEX",
    "RecordKind",
    "CascadeRecord",
    "ScanRow",
    "CascadeBracketError",
    "classify_parameter",
    "feigenbaum_next",
    "feigenbaum_accumulation",
    "feigenbaum_delta",
    "locate_doubling",
    "locate_symmetry_split",
    "run_series",
    "scan",
    "series_defaults",
]

log = logging.getLogger(__name__)

# First Feigenbaum constant: limiting ratio of successive bifurcation intervals.
FEIGENBAUM_DELTA = 4.669201609

# Serialized index for the accumulation-point record of a series.
ACCUMULATION_INDEX = -1

_MAX_BISECTIONS = 60


class RecordKind(enum.Enum):
    MEASURED = "measured"
    EXTRAPOLATED = "extrapolated"


class CascadeBracketError(RuntimeError):
    """The (r | 2r) bracket assumption failed inside a bisection."""


@dataclass(frozen=True)
class CascadeRecord:
    character: int
    index: int                  # ACCUMULATION_INDEX marks the limit estimate
    b_value: float
    kind: RecordKind
    bracket_width: float = math.nan   # Measured records only


@dataclass(frozen=True)
class ScanRow:
    b: float
    outcome: str                # 'periodic' | 'aperiodic' | 'diverged' | 'error: ...'
    rotation: int | None = None
    period: float | None = None
    symmetry: str | None = None
    residual: float | None = None


def classify_parameter(b: float, search: OrbitSearchOptions | None = None,
                       opts: IntegratorOptions | None = None,
                       seed=DEFAULT_SEED) -> AttractorVerdict:
    """Attractor verdict at (a=1, b) from the default seed."""
    if not 0.0 <= b < 1.0:
        raise ValueError(f"b must lie in [0, 1), got {b}")
    return detect_orbit(seed, SystemParams(1.0, b), search, opts)


def feigenbaum_next(b_prev: float, b_curr: float) -> float:
    """Next critical value, shrinking the last interval by delta."""
    if b_prev < b_curr:
        raise ValueError("need b_prev >= b_curr")
    return b_curr - (b_prev - b_curr) / FEIGENBAUM_DELTA


def feigenbaum_accumulation(b_prev: float, b_curr: float) -> float:
    """Accumulation point of the cascade: geometric sum of the remaining
    intervals below b_prev."""
    if b_prev < b_curr:
        raise ValueError("need b_prev >= b_curr")
    return b_prev - (b_prev - b_curr) / (1.0 - 1.0 / FEIGENBAUM_DELTA)


def feigenbaum_delta(b_nm2: float, b_nm1: float, b_n: float) -> float:
    """Interval ratio of three consecutive critical values."""
    if not (b_nm2 > b_nm1 >= b_n):
        raise ValueError("need a decreasing triple")
    if b_nm1 == b_n:
        raise ZeroDivisionError("zero trailing interval")
    return (b_nm2 - b_nm1) / (b_nm1 - b_n)


def _character_and_index(r: int) -> tuple[int, int]:
    """Series character (odd base) and doubling index of the r -> 2r event."""
    c = r
    n = 0
    while c % 2 == 0:
        c //= 2
        n += 1
    if c == 1:
        n += 1        # character 1 spends index 0 on the symmetry split
    return c, n


def _rotation_of(verdict: AttractorVerdict, b: float) -> int:
    if verdict.outcome is Outcome.DIVERGED:
        raise CascadeBracketError(f"trajectory diverged at b={b:.9g}")
    if verdict.outcome is Outcome.APERIODIC:
        raise CascadeBracketError(
            f"aperiodic attractor at b={b:.9g}: bracket assumption violated")
    return verdict.orbit.rotation


def locate_doubling(b_hi: float, b_lo: float, r: int, tol_b: float,
                    search: OrbitSearchOptions | None = None,
                    opts: IntegratorOptions | None = None) -> CascadeRecord:
    """Bisect the rotation doubling r -> 2r inside (b_lo, b_hi).

    Verdicts with rotation < 2r shrink toward the r side, >= 2r toward the
    doubled side; an aperiodic verdict inside the bracket aborts.
    """
    if not b_lo < b_hi:
        raise ValueError("need b_lo < b_hi")
    r_hi = _rotation_of(classify_parameter(b_hi, search, opts), b_hi)
    r_lo = _rotation_of(classify_parameter(b_lo, search, opts), b_lo)
    if r_hi != r:
        raise ValueError(f"rotation at b_hi={b_hi:.9g} is {r_hi}, expected {r}")
    if r_lo < 2 * r:
        raise ValueError(
            f"rotation at b_lo={b_lo:.9g} is {r_lo}, expected >= {2 * r}")
    for _ in range(_MAX_BISECTIONS):
        if b_hi - b_lo <= tol_b:
            break
        mid = 0.5 * (b_hi + b_lo)
        rot = _rotation_of(classify_parameter(mid, search, opts), mid)
        if rot < 2 * r:
            b_hi = mid
        else:
            b_lo = mid
    else:
        raise CascadeBracketError(
            f"no convergence to tol_b={tol_b:g} within {_MAX_BISECTIONS} "
            f"bisections")
    character, index = _character_and_index(r)
    return CascadeRecord(character=character, index=index,
                         b_value=0.5 * (b_hi + b_lo), kind=RecordKind.MEASURED,
                         bracket_width=b_hi - b_lo)


def _symmetry_of(verdict: AttractorVerdict, b: float) -> Symmetry:
    rot = _rotation_of(verdict, b)
    if rot != 1:
        raise CascadeBracketError(
            f"rotation at b={b:.9g} is {rot}; the symmetry split is bracketed "
            f"at rotation 1")
    return verdict.orbit.symmetry


def locate_symmetry_split(b_hi: float, b_lo: float, tol_b: float,
                          search: OrbitSearchOptions | None = None,
                          opts: IntegratorOptions | None = None) -> CascadeRecord:
    """Bisect the symmetry-breaking split of the rotation-1 cycle (series-1
    index 0): self-symmetric above, a mirror pair below."""
    if not b_lo < b_hi:
        raise ValueError("need b_lo < b_hi")
    if _symmetry_of(classify_parameter(b_hi, search, opts), b_hi) is not \
            Symmetry.SELF_SYMMETRIC:
        raise ValueError(f"cycle at b_hi={b_hi:.9g} is not self-symmetric")
    if _symmetry_of(classify_parameter(b_lo, search, opts), b_lo) is not \
            Symmetry.PAIR_MEMBER:
        raise ValueError(f"cycle at b_lo={b_lo:.9g} is not a pair member")
    for _ in range(_MAX_BISECTIONS):
        if b_hi - b_lo <= tol_b:
            break
        mid = 0.5 * (b_hi + b_lo)
        if _symmetry_of(classify_parameter(mid, search, opts), mid) is \
                Symmetry.SELF_SYMMETRIC:
            b_hi = mid
        else:
            b_lo = mid
    else:
        raise CascadeBracketError(
            f"no convergence to tol_b={tol_b:g} within {_MAX_BISECTIONS} "
            f"bisections")
    return CascadeRecord(character=1, index=0, b_value=0.5 * (b_hi + b_lo),
                         kind=RecordKind.MEASURED, bracket_width=b_hi - b_lo)


def _anchor_below(b_crit: float, r_doubled: int, tol_b: float, search, opts):
    """A parameter just below a located critical value whose attractor
    verifiably carries the doubled rotation (the next hunt starts there).
    Steps away geometrically because classification immediately next to the
    critical value is transient-limited."""
    for frac in (5.0, 20.0, 80.0, 320.0):
        cand = b_crit - frac * tol_b
        try:
            rot = _rotation_of(classify_parameter(cand, search, opts), cand)
        except CascadeBracketError:
            return None
        if rot == r_doubled:
            return cand
        if rot > r_doubled:
            return None      # the doubled window is narrower than tol_b
    return None


def _hunt_down(b_start: float, r: int, step0: float, floor: float,
               search, opts):
    """Walk down from a rotation-r point until the rotation has doubled.

    Returns (b_r_side, b_doubled_side); halves the step over aperiodic or
    off-series windows.
    """
    b_good = b_start
    step = step0
    while True:
        b_next = b_good - step
        if b_next <= floor:
            step *= 0.5
            if step < 1e-9:
                raise CascadeBracketError(
                    f"no rotation-{2 * r} window found above the floor "
                    f"{floor:.9g}")
            continue
        try:
            rot = _rotation_of(classify_parameter(b_next, search, opts), b_next)
        except CascadeBracketError:
            rot = None
        if rot == r:
            b_good = b_next
            continue
        if rot is not None and rot >= 2 * r:
            return b_good, b_next
        step *= 0.5
        if step < 1e-9:
            raise CascadeBracketError(
                f"rotation-{r} window at b={b_good:.9g} has no resolvable "
                f"doubling below it")


def series_defaults(character: int) -> tuple[float, float, float]:
    """(b_upper, b_lower_hint, tol_b) used by the CLI per series character."""
    if character == 1:
        return 0.55, 0.3780, 1e-5
    if character == 13:
        return 0.3340, 0.33330, 1e-7
    if character == 3:
        return 0.3230, 0.31760, 1e-7
    raise ValueError(f"unsupported series character {character}")


def run_series(character: int, b_upper: float, b_lower_hint: float,
               depth: int, tol_b: float | None = None,
               search: OrbitSearchOptions | None = None,
               opts: IntegratorOptions | None = None) -> list[CascadeRecord]:
    """Measure the period-doubling ladder of one series character.

    Alternates bracket hunting (Feigenbaum-predicted once two values exist)
    with bisection; levels whose doubled rotation exceeds max_rotation, or
    whose bracket cannot be found, fall back to extrapolated records.  A final
    record with index ACCUMULATION_INDEX carries the accumulation estimate.
    """
    if character not in (1, 13, 3):
        raise ValueError(f"unsupported series character {character}")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if tol_b is None:
        tol_b = series_defaults(character)[2]
    search = search or OrbitSearchOptions()

    records: list[CascadeRecord] = []
    v_up = classify_parameter(b_upper, search, opts)
    rot_up = _rotation_of(v_up, b_upper)
    if rot_up != character:
        raise ValueError(
            f"rotation at b_upper={b_upper:.9g} is {rot_up}, expected "
            f"{character}")

    measuring = True
    if character == 1:
        # Index 0: symmetry split at unchanged rotation 1.
        if v_up.orbit.symmetry is not Symmetry.SELF_SYMMETRIC:
            raise ValueError(
                f"cycle at b_upper={b_upper:.9g} is not self-symmetric; start "
                f"the series above the symmetry split")
        b_good, step = b_upper, (b_upper - b_lower_hint) / 8.0
        while True:
            b_next = b_good - step
            v = classify_parameter(b_next, search, opts)
            try:
                rot = _rotation_of(v, b_next)
            except CascadeBracketError:
                rot = None
            if rot == 1 and v.orbit.symmetry is Symmetry.SELF_SYMMETRIC:
                b_good = b_next
                continue
            if rot == 1:
                break
            step *= 0.5    # overshot past the first doubling (or off-series)
            if step < tol_b:
                raise CascadeBracketError("no symmetry split found")
        records.append(locate_symmetry_split(b_good, b_next, tol_b, search,
                                             opts))
        anchor = b_next
        n_done = 0
    else:
        anchor = b_upper
        n_done = -1

    r = character
    while n_done < depth:
        n_done += 1
        if measuring and 2 * r > search.max_rotation:
            measuring = False
            log.warning("series %d: rotation %d exceeds max_rotation %d; "
                        "switching to Feigenbaum extrapolation", character,
                        2 * r, search.max_rotation)
        if measuring and anchor is None:
            log.warning("series %d: no verified anchor inside the rotation-%d "
                        "window; switching to Feigenbaum extrapolation",
                        character, r)
            measuring = False
        if measuring:
            if len(records) >= 2 and records[-1].kind is RecordKind.MEASURED \
                    and records[-2].kind is RecordKind.MEASURED:
                gap = records[-2].b_value - records[-1].b_value
                step0 = 1.2 * gap / FEIGENBAUM_DELTA
            else:
                step0 = max((anchor - b_lower_hint) / 4.0, 4.0 * tol_b)
            try:
                b_hi, b_lo = _hunt_down(anchor, r, step0, 0.0, search, opts)
                rec = locate_doubling(b_hi, b_lo, r, tol_b, search, opts)
            except (CascadeBracketError, ValueError) as exc:
                log.warning("series %d: measurement of the rotation %d -> %d "
                            "doubling failed (%s); continuing with "
                            "extrapolation", character, r, 2 * r, exc)
                measuring = False
        if not measuring:
            if len(records) < 2:
                raise CascadeBracketError(
                    f"series {character}: cannot extrapolate from "
                    f"{len(records)} records")
            b_pred = feigenbaum_next(records[-2].b_value, records[-1].b_value)
            _, index = _character_and_index(r)
            rec = CascadeRecord(character=character, index=index,
                                b_value=b_pred, kind=RecordKind.EXTRAPOLATED)
        records.append(rec)
        r *= 2
        if measuring:
            anchor = _anchor_below(rec.b_value, r, tol_b, search, opts)

    if len(records) >= 2:
        acc = feigenbaum_accumulation(records[-2].b_value, records[-1].b_value)
        records.append(CascadeRecord(character=character,
                                     index=ACCUMULATION_INDEX, b_value=acc,
                                     kind=RecordKind.EXTRAPOLATED))
    return records


def _scan_one(b: float, search: OrbitSearchOptions | None,
              opts: IntegratorOptions | None) -> ScanRow:
    try:
        v = classify_parameter(b, search, opts)
    except Exception as exc:   # per-row errors never abort the sweep
        return ScanRow(b=b, outcome=f"error: {exc}")
    if v.outcome is Outcome.PERIODIC:
        o = v.orbit
        return ScanRow(b=b, outcome="periodic", rotation=o.rotation,
                       period=o.period, symmetry=o.symmetry.value,
                       residual=o.residual)
    if v.outcome is Outcome.DIVERGED:
        return ScanRow(b=b, outcome="diverged")
    return ScanRow(b=b, outcome="aperiodic")


def scan(b_start: float, b_end: float, step: float,
         search: OrbitSearchOptions | None = None,
         opts: IntegratorOptions | None = None,
         jobs: int = 1) -> list[ScanRow]:
    """Descending sweep of independent verdicts; rows come back in grid order."""
    if not (b_start >= b_end > 0.0):
        raise ValueError("need b_start >= b_end > 0")
    if not step > 0.0:
        raise ValueError("step must be positive")
    if b_start == b_end:
        return []
    n = int(math.floor((b_start - b_end) / step + 1e-9)) + 1
    grid = [b_start - k * step for k in range(n)]
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda b: _scan_one(b, search, opts), grid))
    return [_scan_one(b, search, opts) for b in grid]
