"""Numerical toolkit for a cubic saddle-focus ("jerk") flow.

Simulates dx/dt = y, dy/dt = z, dz/dt = x^3 - a^2 x - y - b z, detects its
limit closed orbits and their rotation numbers, locates period-doubling
critical values of b by bisection, applies Feigenbaum-constant extrapolation,
and samples invariant manifolds and the attracting set.
"""

__version__ = "0.1.0"

from .cascade import (ACCUMULATION_INDEX, FEIGENBAUM_DELTA, CascadeRecord,
                      RecordKind, ScanRow, classify_parameter,
                      feigenbaum_accumulation, feigenbaum_delta,
                      feigenbaum_next, locate_doubling, locate_symmetry_split,
                      run_series, scan)
from .integrate import (Diverged, IntegratorOptions, SectionEvent,
                        SectionSpec, StepSizeUnderflow, Trajectory,
                        fixed_step_endpoint, integrate, integrate_with_events,
                        x_peak_section)
from .manifold import (AClassSample, ManifoldSweep, SweepDirection,
                       sample_aclass, sweep_manifold)
from .model import (Equilibrium, EquilibriumKind, SystemParams,
                    characteristic_roots, equilibria, jacobian, vector_field)
from .orbit import (DEFAULT_SEED, ROTATION_CONVENTION, AttractorVerdict,
                    ClosedOrbit, InsufficientEventsError, OrbitSearchOptions,
                    Outcome, Symmetry, detect_orbit, rotation_number,
                    symmetry_class)

__all__ = [
    "__version__",
    "SystemParams", "Equilibrium", "EquilibriumKind", "vector_field",
    "jacobian", "characteristic_roots", "equilibria",
    "IntegratorOptions", "Trajectory", "Diverged", "SectionEvent",
    "SectionSpec", "StepSizeUnderflow", "integrate", "integrate_with_events",
    "fixed_step_endpoint", "x_peak_section",
    "OrbitSearchOptions", "ClosedOrbit", "AttractorVerdict", "Outcome",
    "Symmetry", "InsufficientEventsError", "detect_orbit", "rotation_number",
    "symmetry_class", "ROTATION_CONVENTION", "DEFAULT_SEED",
    "FEIGENBAUM_DELTA", "ACCUMULATION_INDEX", "CascadeRecord", "RecordKind",
    "ScanRow", "classify_parameter", "feigenbaum_next",
    "feigenbaum_accumulation", "feigenbaum_delta", "locate_doubling",
    "locate_symmetry_split", "run_series", "scan",
    "SweepDirection", "ManifoldSweep", "AClassSample", "sweep_manifold",
    "sample_aclass",
]
