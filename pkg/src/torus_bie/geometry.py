"""Hole boundaries, trapezoid quadrature grids and point classification.

Every hole is a star-shaped radial curve z(t) = a + rho(t) e^{it}, traversed
counterclockwise around its centre for t in [0, 2 pi). With that traversal the
normal i z'/|z'| points into the hole, and the signed curvature is taken with
respect to the orientation that is positive for the domain outside the holes
(so circles have curvature -1/r).
"""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .exceptions import AreaError, ConfigurationError, InvalidCurve, InvalidN, OverlapError
from .green import KernelPoint

OVERLAP_TOL = 1e-6


@dataclass(frozen=True)
class Hole:
    """Radial curve about ``center``.

    kind is one of ``circle`` (params: r), ``trefoil`` (r), ``oscillatory``
    (r, omega) or ``fourier`` (cos, sin coefficient tuples).
    """

    center: complex
    kind: str
    params: dict = field(default_factory=dict, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if self.kind not in _PROFILES:
            raise ConfigurationError(f"unknown hole kind {self.kind!r}")
        if self.kind == "oscillatory" and float(self.params["omega"]) != int(self.params["omega"]):
            raise InvalidCurve("oscillation factor omega must be an integer")
        rho = self.radius(np.linspace(0, 2 * np.pi, 2048, endpoint=False))
        if np.min(rho) <= 0:
            raise InvalidCurve(f"radial profile of {self.kind} hole is not positive")

    @classmethod
    def circle(cls, center, r):
        return cls(center, "circle", {"r": float(r)})

    @classmethod
    def trefoil(cls, center, r):
        return cls(center, "trefoil", {"r": float(r)})

    @classmethod
    def oscillatory(cls, center, r, omega):
        return cls(center, "oscillatory", {"r": float(r), "omega": int(omega)})

    @classmethod
    def fourier(cls, center, cos, sin=()):
        return cls(center, "fourier", {"cos": tuple(map(float, cos)), "sin": tuple(map(float, sin))})

    def profile(self, t):
        """rho, rho', rho'' at parameter(s) t."""
        return _PROFILES[self.kind](np.asarray(t, dtype=float), **self.params)

    def radius(self, t):
        return self.profile(t)[0]

    def max_radius(self):
        return float(np.max(self.radius(np.linspace(0, 2 * np.pi, 1024, endpoint=False))))

    def scaled(self, factor):
        """Same shape family with its size parameter multiplied by ``factor``.

        Used to build offset test contours such as trefoil(r=0.18) around a
        trefoil(r=0.1) hole.
        """
        p = dict(self.params)
        if self.kind == "fourier":
            p = {"cos": tuple(factor * c for c in p["cos"]), "sin": tuple(factor * c for c in p["sin"])}
        else:
            p["r"] = factor * p["r"]
        return Hole(self.center, self.kind, p)


def _circle(t, r):
    one = np.ones_like(t)
    return r * one, 0 * one, 0 * one


def _trefoil(t, r):
    return r * (1 + 0.3 * np.cos(3 * t)), -0.9 * r * np.sin(3 * t), -2.7 * r * np.cos(3 * t)


def _oscillatory(t, r, omega):
    s = r / (r + 1)
    return (
        s * (1 + r * np.cos(omega * t)),
        -s * r * omega * np.sin(omega * t),
        -s * r * omega**2 * np.cos(omega * t),
    )


def _fourier(t, cos, sin=()):
    rho, d1, d2 = np.zeros_like(t), np.zeros_like(t), np.zeros_like(t)
    for k, a in enumerate(cos):
        rho += a * np.cos(k * t)
        d1 -= a * k * np.sin(k * t)
        d2 -= a * k**2 * np.cos(k * t)
    for k, b in enumerate(sin):
        rho += b * np.sin(k * t)
        d1 += b * k * np.cos(k * t)
        d2 -= b * k**2 * np.sin(k * t)
    return rho, d1, d2


_PROFILES = {"circle": _circle, "trefoil": _trefoil, "oscillatory": _oscillatory, "fourier": _fourier}


def curve_eval(hole, t):
    """Position, tangent, inward normal, speed and signed curvature at t."""
    t = np.asarray(t, dtype=float)
    rho, d1, d2 = hole.profile(t)
    if np.any(rho <= 0):
        raise InvalidCurve("radial profile is not positive")
    e = np.exp(1j * t)
    z = hole.center + rho * e
    dz = (d1 + 1j * rho) * e
    ddz = (d2 - rho + 2j * d1) * e
    speed = np.abs(dz)
    normal = 1j * dz / speed
    curvature = -(np.conj(dz) * ddz).imag / speed**3
    return KernelPoint(position=z, normal=normal, speed=speed, curvature=curvature, tangent=dz)


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Trapezoid nodes on all hole boundaries, concatenated hole by hole."""

    torus: object
    holes: tuple
    counts: tuple
    t: np.ndarray
    z: np.ndarray
    normal: np.ndarray
    speed: np.ndarray
    curvature: np.ndarray
    weights: np.ndarray
    hole_index: np.ndarray
    areas: np.ndarray
    perimeters: np.ndarray

    @property
    def n(self):
        return self.z.size

    @property
    def n_holes(self):
        return len(self.holes)

    @property
    def offsets(self):
        return np.concatenate([[0], np.cumsum(self.counts)])

    def slice(self, j):
        o = self.offsets
        return slice(o[j], o[j + 1])

    @property
    def total_area(self):
        return float(np.sum(self.areas))

    @property
    def perimeter(self):
        return float(np.sum(self.weights))

    @property
    def fingerprint(self):
        return (self.counts, self.torus.tau)

    def points(self):
        return KernelPoint(self.z, self.normal, self.speed, self.curvature)

    def refined(self, factor=2):
        return build_grid(self.holes, [factor * c for c in self.counts], self.torus)


def build_grid(holes, nodes_per_hole, torus, check=True):
    """Equispaced trapezoid grid with ``nodes_per_hole`` (int or list) nodes per hole."""
    holes = tuple(holes)
    if not holes:
        raise ConfigurationError("at least one hole is required")
    if np.isscalar(nodes_per_hole):
        nodes_per_hole = [int(nodes_per_hole)] * len(holes)
    counts = tuple(int(n) for n in nodes_per_hole)
    if len(counts) != len(holes):
        raise ConfigurationError("nodes_per_hole must give one count per hole")
    for n in counts:
        if n < 4 or n % 2:
            raise InvalidN(f"nodes per hole must be even and >= 4, got {n}")

    parts = []
    for j, (hole, n) in enumerate(zip(holes, counts)):
        t = 2 * np.pi * np.arange(n) / n
        p = curve_eval(hole, t)
        w = (2 * np.pi / n) * p.speed
        # shoelace: 1/2 oint (x dy - y dx), about the centre for conditioning
        area = 0.5 * np.sum((np.conj(p.position - hole.center) * p.tangent).imag) * 2 * np.pi / n
        parts.append((t, p, w, np.full(n, j), area, np.sum(w)))

    grid = QuadratureGrid(
        torus=torus,
        holes=holes,
        counts=counts,
        t=np.concatenate([q[0] for q in parts]),
        z=np.concatenate([q[1].position for q in parts]),
        normal=np.concatenate([q[1].normal for q in parts]),
        speed=np.concatenate([q[1].speed for q in parts]),
        curvature=np.concatenate([q[1].curvature for q in parts]),
        weights=np.concatenate([q[2] for q in parts]),
        hole_index=np.concatenate([q[3] for q in parts]),
        areas=np.array([q[4] for q in parts]),
        perimeters=np.array([q[5] for q in parts]),
    )
    if check:
        check_holes(holes, torus)
        if grid.total_area >= torus.b:
            raise AreaError(f"total hole area {grid.total_area} >= torus area {torus.b}")
    return grid


def check_holes(holes, torus, n_samples=256, tol=OVERLAP_TOL):
    """Raise OverlapError if holes (or periodic copies of a hole) touch."""
    t = 2 * np.pi * np.arange(n_samples) / n_samples
    samples = [curve_eval(h, t).position for h in holes]
    for i in range(len(holes)):
        for j in range(i, len(holes)):
            d = _pair_distance(holes[i], holes[j], samples[i], samples[j], torus) if i != j else _self_image_distance(samples[i], torus)
            if d <= tol:
                what = f"hole {i} overlaps its own periodic image" if i == j else f"holes {i} and {j} overlap"
                raise OverlapError(f"{what} (min distance {d:.3g})")


def _pair_distance(hi, hj, si, sj, torus):
    # boundaries that cross or nest put sampled points of one inside the other
    if np.any(_inside(si, hj, torus)) or np.any(_inside(sj, hi, torus)):
        return 0.0
    return float(np.min(np.abs(torus.nearest_image(si[:, None] - sj[None, :]))))


def _self_image_distance(z, torus):
    diff = z[:, None] - z[None, :]
    best = np.inf
    for m in (-1, 0, 1):
        for n in (-1, 0, 1):
            if m or n:
                best = min(best, np.min(np.abs(diff + m + n * torus.tau)))
    return best


def _inside(z, hole, torus):
    d = torus.nearest_image(np.asarray(z, dtype=complex) - hole.center)
    return np.abs(d) < hole.radius(np.angle(d))


class Region(Enum):
    OMEGA = "omega"
    HOLE = "hole"
    NEAR = "near"


def classify_points(z, grid, band=None):
    """Vectorised classification: returns (region codes, hole index) arrays.

    Codes: 0 = in the domain, 1 = inside hole j, 2 = within ``band`` of the
    sampled boundary of hole j. Hole index is -1 for domain points.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if band is None:
        band = 2 * float(np.max(grid.weights))
    code = np.zeros(z.shape, dtype=int)
    which = np.full(z.shape, -1)
    for j, hole in enumerate(grid.holes):
        d = grid.torus.nearest_image(z - hole.center)
        inside = np.abs(d) < hole.radius(np.angle(d))
        nodes = grid.z[grid.slice(j)]
        dist = np.min(np.abs(grid.torus.nearest_image(z[:, None] - nodes[None, :])), axis=1)
        near = dist <= band
        code = np.where(inside & (code == 0), 1, code)
        which = np.where(inside & (which < 0), j, which)
        code = np.where(near, 2, code)
        which = np.where(near, j, which)
    return code, which


def classify_point(z, grid, band=None):
    """Region of a single point: (Region.OMEGA, None), (Region.HOLE, j) or (Region.NEAR, j)."""
    code, which = classify_points([z], grid, band)
    kind = (Region.OMEGA, Region.HOLE, Region.NEAR)[int(code[0])]
    return kind, (None if kind is Region.OMEGA else int(which[0]))


def random_oscillatory_holes(m, seed, torus, r_range=(0.05, 0.1), omega_range=(3, 7), gap=0.04, max_tries=20000):
    """Non-overlapping oscillatory holes with random centres, radii and omegas.

    Rejection sampling in lattice coordinates; ``gap`` is the minimum distance
    between any two hole boundaries.
    """
    rng = np.random.default_rng(seed)
    t = 2 * np.pi * np.arange(128) / 128
    holes, samples = [], []
    for _ in range(max_tries):
        if len(holes) == m:
            break
        u, v = rng.uniform(0, 1, size=2)
        r = rng.uniform(*r_range)
        omega = int(rng.integers(omega_range[0], omega_range[1] + 1))
        cand = Hole.oscillatory(u + v * torus.tau, round(r, 3), omega)
        zc = curve_eval(cand, t).position
        if _self_image_distance(zc, torus) <= gap:
            continue
        if any(_pair_distance(cand, h, zc, zh, torus) <= gap for h, zh in zip(holes, samples)):
            continue
        holes.append(cand)
        samples.append(zc)
    if len(holes) < m:
        raise ConfigurationError(f"could only place {len(holes)} of {m} holes")
    return holes
