"""The cubic saddle-focus flow, its Jacobian and its equilibrium structure.

The system is the third-order ("jerk") flow

    dx/dt = y,  dy/dt = z,  dz/dt = x^3 - a^2 x - y - b z,

an odd vector field with equilibria at the origin and at (+-a, 0, 0).  For
a = 1 and 0 <= b < 1 all three equilibria are saddle-foci: the origin has a
1D stable manifold and a 2D unstable eigenplane, the outer pair the reverse.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SystemParams",
    "EquilibriumKind",
    "Equilibrium",
    "vector_field",
    "jacobian",
    "characteristic_roots",
    "equilibria",
]

# An eigenvalue counts as real when |Im| < REAL_EIG_TOL * (1 + |lambda|).
REAL_EIG_TOL = 1e-9


@dataclass(frozen=True)
class SystemParams:
    """Parameter pair (a, b); b is the bifurcation parameter."""

    a: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        if not (self.a > 0.0):
            raise ValueError(f"a must be positive, got {self.a}")
        if not (0.0 <= self.b < 1.0):
            raise ValueError(f"b must lie in [0, 1), got {self.b}")


class EquilibriumKind(enum.Enum):
    """Saddle-focus type by the dimension of the stable eigenspace."""

    SADDLE_FOCUS_1D_STABLE = "saddle_focus_1d_stable"   # origin type
    SADDLE_FOCUS_2D_STABLE = "saddle_focus_2d_stable"   # outer pair type
    OTHER = "other"


@dataclass(frozen=True)
class Equilibrium:
    point: np.ndarray
    eigenvalues: np.ndarray          # real root first, then the pair (+Im first)
    kind: EquilibriumKind
    real_eigvec: np.ndarray          # unit eigenvector of the real eigenvalue
    plane_basis: np.ndarray = field(default=None)  # (2, 3) orthonormal, or None
    params: SystemParams = field(default=None)     # parameters it belongs to

    @property
    def name(self) -> str:
        x = self.point[0]
        if x == 0.0:
            return "p0"
        return "p1" if x < 0.0 else "p2"


def vector_field(s, p: SystemParams) -> np.ndarray:
    """Right-hand side (y, z, x^3 - a^2 x - y - b z) at state s = (x, y, z)."""
    x, y, z = s
    return np.array([y, z, x ** 3 - p.a ** 2 * x - y - p.b * z])


def jacobian(s, p: SystemParams) -> np.ndarray:
    """Derivative matrix of the field; only the bottom row depends on s."""
    x = s[0]
    return np.array([
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [3.0 * x ** 2 - p.a ** 2, -1.0, -p.b],
    ])


def characteristic_roots(x: float, p: SystemParams) -> np.ndarray:
    """Roots of lam^3 + b lam^2 + lam - (3 x^2 - a^2), the Jacobian spectrum.

    Ordered with the real root first, then the complex pair with the positive
    imaginary part leading.  A triple of real roots comes back ascending with
    zero imaginary parts.
    """
    c = 3.0 * x ** 2 - p.a ** 2
    roots = np.roots([1.0, p.b, 1.0, -c]).astype(complex)
    is_real = np.abs(roots.imag) < REAL_EIG_TOL * (1.0 + np.abs(roots))
    if is_real.sum() == 1:
        real_root = roots[is_real][0].real
        pair = roots[~is_real]
        pair = pair[np.argsort(-pair.imag)]
        return np.array([real_root + 0j, pair[0], pair[1]])
    # Degenerate spectrum: return ascending real parts, imaginary parts zeroed.
    ordered = np.sort_complex(roots.real + 0j)
    return ordered


def _plane_basis(lam: complex) -> np.ndarray:
    """Orthonormal basis of the eigenplane of the complex pair.

    The Jacobian is in companion form, so (1, lam, lam^2) is an exact
    eigenvector for eigenvalue lam; the plane is spanned by its real and
    imaginary parts.
    """
    v = np.array([1.0, lam, lam ** 2])
    e1 = v.real / np.linalg.norm(v.real)
    u2 = v.imag - (v.imag @ e1) * e1
    return np.vstack([e1, u2 / np.linalg.norm(u2)])


def equilibria(p: SystemParams) -> list[Equilibrium]:
    """The three equilibria p0 = (0,0,0), p1 = (-a,0,0), p2 = (a,0,0)."""
    out = []
    for x0 in (0.0, -p.a, p.a):
        roots = characteristic_roots(x0, p)
        lam_r = roots[0]
        is_real = np.abs(roots.imag) < REAL_EIG_TOL * (1.0 + np.abs(roots))
        if is_real.sum() != 1:
            kind = EquilibriumKind.OTHER
            basis = None
        elif lam_r.real < 0.0 and roots[1].real > 0.0:
            kind = EquilibriumKind.SADDLE_FOCUS_1D_STABLE
            basis = _plane_basis(roots[1])
        elif lam_r.real > 0.0 and roots[1].real < 0.0:
            kind = EquilibriumKind.SADDLE_FOCUS_2D_STABLE
            basis = _plane_basis(roots[1])
        else:
            kind = EquilibriumKind.OTHER
            basis = None
        rv = np.array([1.0, lam_r.real, lam_r.real ** 2])
        out.append(Equilibrium(
            point=np.array([x0, 0.0, 0.0]),
            eigenvalues=roots,
            kind=kind,
            real_eigvec=rv / np.linalg.norm(rv),
            plane_basis=basis,
            params=p,
        ))
    return out
