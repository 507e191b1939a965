import numpy as np
import pytest

from shilnikov import SystemParams


@pytest.fixture(scope="session")
def p_default():
    return SystemParams(a=1.0, b=0.315)


def polyline_min_distance(points, polyline, chunk=4096):
    """Min distance from each query point to a densely sampled polyline.

    Nearest node by a BLAS distance matrix, refined exactly on the segments
    adjacent to it; accurate when node spacing resolves the curve.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    v = np.asarray(polyline, dtype=float)
    m = len(v)
    v2 = np.einsum("ij,ij->i", v, v)
    out = np.empty(len(points))
    for lo in range(0, len(points), chunk):
        p = points[lo:lo + chunk]
        d2 = np.maximum(np.einsum("ij,ij->i", p, p)[:, None] + v2[None, :]
                        - 2.0 * p @ v.T, 0.0)
        j = d2.argmin(axis=1)
        best = d2[np.arange(len(p)), j]
        for js in (np.maximum(j - 1, 0), np.minimum(j, m - 2)):
            a = v[js]
            ab = v[js + 1] - a
            ab2 = np.einsum("ij,ij->i", ab, ab)
            ab2[ab2 == 0.0] = 1.0
            t = np.clip(np.einsum("ij,ij->i", p - a, ab) / ab2, 0.0, 1.0)
            d = p - a - t[:, None] * ab
            best = np.minimum(best, np.einsum("ij,ij->i", d, d))
        out[lo:lo + chunk] = np.sqrt(best)
    return out


def loop_samples(orbit, n=4000):
    """Dense resampling of a closed orbit over one period."""
    ts = np.linspace(orbit.loop.t0, orbit.loop.t1, n)
    return orbit.loop(ts)


def cardano_roots(b_coeff: float, c_value: float) -> np.ndarray:
    """Independent closed-form roots of lam^3 + b lam^2 + lam - c.

    Classic depressed-cubic solution; kept free of numpy.roots so it can
    serve as the oracle for the companion-matrix path.
    """
    p, q, r = b_coeff, 1.0, -c_value
    a1 = q - p * p / 3.0
    b1 = 2.0 * p ** 3 / 27.0 - p * q / 3.0 + r
    shift = -p / 3.0
    disc = (b1 / 2.0) ** 2 + (a1 / 3.0) ** 3
    if disc > 0.0:
        sq = np.sqrt(disc)
        t = np.cbrt(-b1 / 2.0 + sq) + np.cbrt(-b1 / 2.0 - sq)
        lam_real = t + shift
        # Deflate: lam^2 + (p + lam)lam' + (q + lam(p + lam)) = 0
        beta = p + lam_real
        gamma = q + lam_real * beta
        inner = beta * beta / 4.0 - gamma
        re = -beta / 2.0
        im = np.sqrt(-inner)
        return np.array([lam_real + 0j, re + 1j * im, re - 1j * im])
    # Three real roots (trigonometric form).
    m = 2.0 * np.sqrt(-a1 / 3.0)
    theta = np.arccos(np.clip(3.0 * b1 / (a1 * m), -1.0, 1.0)) / 3.0
    ts = m * np.cos(theta - 2.0 * np.pi * np.arange(3) / 3.0)
    return np.sort(ts + shift) + 0j
