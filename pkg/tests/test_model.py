import numpy as np
import pytest

from shilnikov import (EquilibriumKind, SystemParams, characteristic_roots,
                       equilibria, jacobian, vector_field)

from conftest import cardano_roots


def test_vector_field_at_equilibria():
    assert np.allclose(vector_field((0, 0, 0), SystemParams(1.0, 0.315)), 0.0)
    assert np.allclose(vector_field((1, 0, 0), SystemParams(1.0, 0.5)), 0.0)


def test_vector_field_direct_substitution():
    out = vector_field((0, 1, 0), SystemParams(1.0, 0.5))
    assert np.allclose(out, [1.0, 0.0, -1.0])


def test_vector_field_odd_symmetry_exact():
    rng = np.random.default_rng(7)
    for _ in range(50):
        s = rng.uniform(-2, 2, size=3)
        p = SystemParams(a=rng.uniform(0.5, 2.0), b=rng.uniform(0.0, 0.99))
        assert np.array_equal(vector_field(-s, p), -vector_field(s, p))


def test_jacobian_rows():
    J = jacobian((0, 0, 0), SystemParams(1.0, 0.315))
    assert np.allclose(J[0], [0, 1, 0]) and np.allclose(J[1], [0, 0, 1])
    assert np.allclose(J[2], [-1.0, -1.0, -0.315])
    J = jacobian((1, 0, 0), SystemParams(1.0, 0.315))
    assert np.allclose(J[2], [2.0, -1.0, -0.315])


def test_jacobian_matches_finite_differences():
    p = SystemParams(1.0, 0.4)
    s = np.array([0.3, -0.2, 0.7])
    J = jacobian(s, p)
    h = 1e-6
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        col = (vector_field(s + e, p) - vector_field(s - e, p)) / (2 * h)
        assert np.abs(col - J[:, j]).max() < 1e-6


def test_equilibria_points_and_kinds():
    eqs = equilibria(SystemParams(1.0, 0.315))
    assert np.allclose([e.point for e in eqs],
                       [[0, 0, 0], [-1, 0, 0], [1, 0, 0]])
    assert eqs[0].kind is EquilibriumKind.SADDLE_FOCUS_1D_STABLE
    assert eqs[1].kind is EquilibriumKind.SADDLE_FOCUS_2D_STABLE
    assert eqs[2].kind is EquilibriumKind.SADDLE_FOCUS_2D_STABLE


def test_equilibria_eigenvalue_signs():
    eqs = equilibria(SystemParams(1.0, 0.315))
    p0, _, p2 = eqs
    assert p0.eigenvalues[0].real < 0 and p0.eigenvalues[1].real > 0
    assert p2.eigenvalues[0].real > 0 and p2.eigenvalues[1].real < 0


def test_equilibria_field_zero_and_vieta():
    for b in (0.0, 0.315, 0.9):
        p = SystemParams(1.0, b)
        for eq in equilibria(p):
            assert np.abs(vector_field(eq.point, p)).max() < 1e-12
            ev = eq.eigenvalues
            x = eq.point[0]
            assert abs(ev.sum() - (-b)) < 1e-9
            assert abs(np.prod(ev) - (3 * x ** 2 - 1.0)) < 1e-9


def test_saddle_focus_across_window():
    # One real + complex pair with the published stability pattern on a grid.
    for b in np.arange(0.0, 0.91, 0.1):
        eqs = equilibria(SystemParams(1.0, round(b, 2)))
        assert eqs[0].kind is EquilibriumKind.SADDLE_FOCUS_1D_STABLE, b
        assert eqs[1].kind is EquilibriumKind.SADDLE_FOCUS_2D_STABLE, b
        assert eqs[2].kind is EquilibriumKind.SADDLE_FOCUS_2D_STABLE, b


def test_characteristic_roots_examples():
    # x=0, b=0: lam^3 + lam + 1
    roots = characteristic_roots(0.0, SystemParams(1.0, 0.0))
    assert abs(roots[0].real - (-0.6823278038280193)) < 1e-9
    assert roots[1].imag > 0 > roots[2].imag
    # x=1, b=0: lam^3 + lam - 2 = (lam - 1)(lam^2 + lam + 2)
    roots = characteristic_roots(1.0, SystemParams(1.0, 0.0))
    assert abs(roots[0] - 1.0) < 1e-9
    assert abs(roots[1] - (-0.5 + 0.5j * np.sqrt(7))) < 1e-9


def test_characteristic_roots_match_cardano_oracle():
    rng = np.random.default_rng(11)
    for _ in range(100):
        x = rng.uniform(-2, 2)
        p = SystemParams(a=rng.uniform(0.5, 2.0), b=rng.uniform(0.0, 0.99))
        got = characteristic_roots(x, p)
        want = cardano_roots(p.b, 3 * x ** 2 - p.a ** 2)
        assert np.abs(np.sort_complex(got) - np.sort_complex(want)).max() < 1e-9


def test_characteristic_roots_vieta_random():
    rng = np.random.default_rng(3)
    for _ in range(100):
        x = rng.uniform(-2, 2)
        p = SystemParams(a=rng.uniform(0.5, 2.0), b=rng.uniform(0.0, 0.99))
        roots = characteristic_roots(x, p)
        assert abs(roots.sum() - (-p.b)) < 1e-9
        assert abs(np.prod(roots) - (3 * x ** 2 - p.a ** 2)) < 1e-9
        pairsum = (roots[0] * roots[1] + roots[0] * roots[2]
                   + roots[1] * roots[2])
        assert abs(pairsum - 1.0) < 1e-9


def test_plane_basis_orthonormal_and_eigvec_unit():
    for eq in equilibria(SystemParams(1.0, 0.315)):
        assert abs(np.linalg.norm(eq.real_eigvec) - 1.0) < 1e-12
        G = eq.plane_basis @ eq.plane_basis.T
        assert np.abs(G - np.eye(2)).max() < 1e-12


def test_params_validation():
    with pytest.raises(ValueError):
        SystemParams(a=0.0, b=0.5)
    with pytest.raises(ValueError):
        SystemParams(a=1.0, b=1.0)
    with pytest.raises(ValueError):
        SystemParams(a=1.0, b=-0.1)
