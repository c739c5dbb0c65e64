"""Doubly-periodic Green's function and the layer-potential kernels built from it.

    G(z) = -log|theta1(z)| / (2 pi) + Im(z)^2 / (2 b),    Laplacian G = 1/b - delta

All functions broadcast over numpy arrays. Normals follow the convention used
throughout the package: unit complex numbers pointing *into* the holes.
"""
from dataclasses import dataclass

import numpy as np

from . import elliptic
from .elliptic import _log_deriv_reduced, _theta_reduced
from .exceptions import SingularArgument


@dataclass(frozen=True)
class KernelPoint:
    """A boundary (or target) point together with its local geometry.

    Fields may be scalars or equally-shaped arrays. ``tangent`` is the raw
    derivative z'(t) of the parametrization when the point came from a curve.
    """

    position: complex
    normal: complex = 1.0
    speed: float = 1.0
    curvature: float = 0.0
    tangent: complex = None


def _reduced(z, torus):
    zr, _, _ = torus.reduce(z)
    u, v = torus.lattice_coords(zr)
    if np.any(np.maximum(np.abs(u), np.abs(v)) < elliptic.EXCLUSION_RADIUS):
        raise SingularArgument("Green's function evaluated at a lattice point")
    return zr


def green(z, torus):
    zr = _reduced(z, torus)
    theta, _ = _theta_reduced(zr, torus)
    out = -np.log(np.abs(theta)) / (2 * np.pi) + zr.imag**2 / (2 * torus.b)
    return out[()] if np.ndim(out) == 0 else out


def green_gradient_complex(z, torus):
    """G_x + i G_y packed into one complex array."""
    zr = _reduced(z, torus)
    f = _log_deriv_reduced(zr, torus)
    # d/dx Re log theta = Re F,  d/dy Re log theta = -Im F
    gx = -f.real / (2 * np.pi)
    gy = f.imag / (2 * np.pi) + zr.imag / torus.b
    return gx + 1j * gy


def green_gradient(z, torus):
    """Return (G_x, G_y)."""
    g = green_gradient_complex(z, torus)
    return g.real, g.imag


def _dot(a, b):
    # a o b = Re(a conj(b))
    return (a * np.conj(b)).real


def normal_deriv_source(z, xi, torus):
    """Double-layer kernel d/d(nu_xi) G(z - xi)."""
    grad = green_gradient_complex(np.asarray(z) - np.asarray(xi.position), torus)
    return -_dot(grad, np.asarray(xi.normal))


def normal_deriv_target(z, xi, torus):
    """Adjoint double-layer kernel d/d(nu_z) G(z - xi); ``z`` is a KernelPoint."""
    grad = green_gradient_complex(np.asarray(z.position) - np.asarray(xi), torus)
    return _dot(grad, np.asarray(z.normal))


def diagonal_limit(curvature):
    """Common continuous extension of both double-layer kernels on the diagonal."""
    return -np.asarray(curvature) / (4 * np.pi)


def single_layer_remainder(s, t, zs, zt, torus):
    """G(z(s) - z(t)) + log(4 sin^2((s - t)/2)) / (4 pi), continuous at s = t.

    ``zs`` and ``zt`` are KernelPoints on the same hole at parameters s and t.
    On the diagonal the analytic limit -(log(speed) + log|theta1'(0)|) / (2 pi)
    is returned; it follows from G(z) = -log|z| / (2 pi) - log|theta1'(0)| / (2 pi) + O(|z|^2).
    """
    s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
    dz = np.asarray(zs.position) - np.asarray(zt.position)
    dz = np.broadcast_to(dz, s.shape)
    speed = np.broadcast_to(np.asarray(zt.speed, dtype=float), s.shape)
    diag = np.isclose(np.mod(s - t + np.pi, 2 * np.pi), np.pi, rtol=0, atol=1e-15)
    out = np.empty(s.shape)
    off = ~diag
    if np.any(off):
        d = s[off] - t[off]
        out[off] = green(dz[off], torus) + np.log(4 * np.sin(d / 2) ** 2) / (4 * np.pi)
    if np.any(diag):
        c = elliptic.log_abs_theta1_prime_at_zero(torus)
        out[diag] = -(np.log(speed[diag]) + c) / (2 * np.pi)
    return out[()] if out.ndim == 0 else out
