"""Jacobi theta function on the lattice 1, tau.

Only the odd theta function is needed:

    theta1(z) = 2 * sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) pi z),   q = exp(i pi tau)

Arguments are first reduced to the lattice cell centred at the origin, where
|Im z| <= Im(tau)/2, so the series needs only a handful of terms.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exceptions import ConfigurationError, NonConvergent, SingularArgument

MIN_TORUS_HEIGHT = 0.05
EXCLUSION_RADIUS = 1e-12


@dataclass(frozen=True)
class SeriesTolerance:
    rtol: float = 1e-15
    n_max: int = 64

    def __post_init__(self):
        if not self.rtol > 0:
            raise ConfigurationError(f"rtol must be positive, got {self.rtol}")
        if self.n_max < 1:
            raise ConfigurationError(f"n_max must be >= 1, got {self.n_max}")


DEFAULT_TOL = SeriesTolerance()


@dataclass(frozen=True)
class Torus:
    """Flat torus C / (Z + tau Z)."""

    tau: complex
    tol: SeriesTolerance = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        tau = complex(self.tau)
        if not np.isfinite(tau):
            raise ConfigurationError(f"tau must be finite, got {tau}")
        if not tau.imag > 0:
            raise ConfigurationError(f"Im(tau) must be positive, got {tau}")
        if tau.imag < MIN_TORUS_HEIGHT:
            raise ConfigurationError(
                f"Im(tau) = {tau.imag} < {MIN_TORUS_HEIGHT}: torus too thin for the theta series"
            )
        object.__setattr__(self, "tau", tau)

    @classmethod
    def square(cls):
        return cls(1j)

    @classmethod
    def equilateral(cls):
        return cls(0.5 + 0.5j * np.sqrt(3.0))

    @property
    def b(self):
        """Torus area, equal to Im(tau)."""
        return self.tau.imag

    @property
    def q(self):
        return np.exp(1j * np.pi * self.tau)

    @cached_property
    def n_terms(self):
        """Number of series terms needed for any reduced argument."""
        return _n_terms(self.tau, self.tol)

    def lattice_coords(self, z):
        """Real coordinates (u, v) with z = u + v tau."""
        z = np.asarray(z, dtype=complex)
        v = z.imag / self.b
        u = z.real - v * self.tau.real
        return u, v

    def reduce(self, z):
        """Return (z_r, m, n) with z = z_r + m + n tau and z_r in the centred cell."""
        z = np.asarray(z, dtype=complex)
        u, v = self.lattice_coords(z)
        n = np.rint(v)
        m = np.rint(u)
        return z - m - n * self.tau, m, n

    def nearest_image(self, z):
        """Shortest representative of z modulo the lattice.

        The centred cell is not a Voronoi cell for skewed lattices, so the
        eight neighbouring images are also tried.
        """
        zr, _, _ = self.reduce(z)
        best = zr.copy()
        for dm in (-1, 0, 1):
            for dn in (-1, 0, 1):
                if dm == 0 and dn == 0:
                    continue
                cand = zr + dm + dn * self.tau
                better = np.abs(cand) < np.abs(best)
                best = np.where(better, cand, best)
        return best


def _n_terms(tau, tol):
    # ratio of term N+1 to term 0 at the worst reduced argument |Im z| = b/2
    b = tau.imag
    h = 0.5 * b
    for n in range(tol.n_max):
        log_ratio = -np.pi * b * ((n + 1.5) ** 2 - 0.25) + (2 * n + 2) * np.pi * h
        if log_ratio < np.log(tol.rtol):
            return n + 1
    raise NonConvergent(f"theta series needs more than n_max={tol.n_max} terms for tau={tau}")


def _coefficients(torus):
    n = np.arange(torus.n_terms)
    coef = 2.0 * (-1.0) ** n * np.exp(1j * np.pi * torus.tau * (n + 0.5) ** 2)
    return n, coef


def _theta_reduced(zr, torus, derivative=False):
    # sums over the reduced argument; returns theta1 (and theta1') at zr
    n, coef = _coefficients(torus)
    theta = np.zeros_like(zr)
    dtheta = np.zeros_like(zr) if derivative else None
    for k, c in zip(n, coef):
        arg = (2 * k + 1) * np.pi * zr
        theta = theta + c * np.sin(arg)
        if derivative:
            dtheta = dtheta + c * (2 * k + 1) * np.pi * np.cos(arg)
    return theta, dtheta


def _check_tol(torus, tol):
    if tol is not None and tol != torus.tol:
        return Torus(torus.tau, tol)
    return torus


def theta1(z, torus, tol=None):
    """theta1(z) for scalar or array z."""
    torus = _check_tol(torus, tol)
    z = np.asarray(z, dtype=complex)
    zr, m, n = torus.reduce(z)
    theta, _ = _theta_reduced(zr, torus)
    # theta1(w + n tau) = (-1)^n q^{-n^2} exp(-2 pi i n w) theta1(w), theta1(w + 1) = -theta1(w)
    sign = np.where((m + n) % 2 == 0, 1.0, -1.0)
    factor = np.exp(-1j * np.pi * torus.tau * n**2 - 2j * np.pi * n * zr)
    out = sign * factor * theta
    return out[()] if out.ndim == 0 else out


def _log_deriv_reduced(zr, torus):
    u, v = torus.lattice_coords(zr)
    if np.any(np.maximum(np.abs(u), np.abs(v)) < EXCLUSION_RADIUS):
        raise SingularArgument("theta1'/theta1 evaluated at a lattice point")
    theta, dtheta = _theta_reduced(zr, torus, derivative=True)
    return dtheta / theta


def theta1_log_deriv(z, torus, tol=None):
    """theta1'(z) / theta1(z); 1-periodic, drops by 2 pi i under z -> z + tau."""
    torus = _check_tol(torus, tol)
    z = np.asarray(z, dtype=complex)
    zr, _, n = torus.reduce(z)
    out = _log_deriv_reduced(zr, torus) - 2j * np.pi * n
    return out[()] if out.ndim == 0 else out


def theta1_prime_at_zero(torus, tol=None):
    torus = _check_tol(torus, tol)
    n, coef = _coefficients(torus)
    return complex(np.sum(coef * (2 * n + 1) * np.pi))


def log_abs_theta1_prime_at_zero(torus):
    return float(np.log(abs(theta1_prime_at_zero(torus))))
