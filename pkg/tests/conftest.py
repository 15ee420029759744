"""Shared quadrature helpers for kernel and density tests."""

import numpy as np
import pytest


def polar_quadrature(radius: float, n_r: int = 96, n_theta: int = 64):
    """Nodes and weights integrating f(z) over the disk of given radius.

    Gauss-Legendre in the radius (with the Jacobian r folded into the
    weights), equally spaced angles (exact for trigonometric polynomials
    of degree < n_theta). Returns (z, w) with sum w * f(z) ~ integral.
    """
    x, wx = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * (x + 1.0) * radius
    wr = 0.5 * radius * wx * r
    theta = np.arange(n_theta) * (2.0 * np.pi / n_theta)
    wt = 2.0 * np.pi / n_theta
    z = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
    w = (np.broadcast_to(wr[:, None] * wt, (n_r, n_theta))).ravel()
    return z, w


@pytest.fixture
def disk_quad():
    return polar_quadrature
