"""Boundary-value problems assembled from data terms with known harmonic extensions.

A problem is a geometry plus a sum of data terms. Each term knows its boundary
data on any grid and, when possible, the harmonic function it comes from, so
manufactured problems carry their own exact solution.
"""
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError
from .expr import evaluate, parse_expr
from .fields import eval_single_layer
from .geometry import build_grid
from .green import KernelPoint, green, normal_deriv_target
from .operators import LayerOperators
from .solvers import solve_dirichlet, solve_neumann

PROBLEM_KINDS = ("dirichlet", "neumann", "steklov")


def node_env(grid):
    """Variables and Green's-function hooks for evaluating expressions at grid nodes."""
    normal = grid.normal

    def dn_green(z, a):
        return normal_deriv_target(KernelPoint(z, np.broadcast_to(normal, z.shape)), a, grid.torus)

    return {
        "x": grid.z.real,
        "y": grid.z.imag,
        "t": grid.t,
        "j": grid.hole_index + 1.0,
        "_green": lambda z, a: green(z - a, grid.torus),
        "_dn_green": dn_green,
    }


def eval_on_grid(src, grid):
    """Evaluate an expression (string or parsed AST) at every node of ``grid``."""
    node = parse_expr(src) if isinstance(src, str) else src
    return np.broadcast_to(np.asarray(evaluate(node, node_env(grid)), dtype=float), (grid.n,)).copy()


@dataclass(frozen=True)
class Constant:
    value: float

    def trace(self, grid, ops, kind):
        return np.full(grid.n, float(self.value))

    def field(self, z, kind, holes, torus):
        # constant Neumann data is only admissible when zero
        return np.full(np.shape(z), float(self.value)) if kind == "dirichlet" else np.zeros(np.shape(z))


@dataclass(frozen=True)
class SingleLayer:
    """coef * S[psi] with psi given per hole as an expression in t (and x, y, j).

    ``psi`` is one expression applied on every hole or a list with one per
    hole. The exact field is evaluated with ``n_fine`` nodes per hole.
    """

    psi: tuple
    coef: float = 1.0
    n_fine: int = 400

    def density(self, grid):
        exprs = [self.psi] if isinstance(self.psi, str) else list(self.psi)
        if len(exprs) == 1:
            return eval_on_grid(exprs[0], grid)
        if len(exprs) != grid.n_holes:
            raise ConfigurationError(f"single-layer density needs 1 or {grid.n_holes} expressions, got {len(exprs)}")
        out = np.empty(grid.n)
        for j, src in enumerate(exprs):
            out[grid.slice(j)] = eval_on_grid(src, grid)[grid.slice(j)]
        return out

    def trace(self, grid, ops, kind):
        psi = self.density(grid)
        if kind == "neumann":
            return self.coef * (ops.Kstar.matrix @ psi + 0.5 * psi)
        return self.coef * (ops.S.matrix @ psi)

    def field(self, z, kind, holes, torus):
        fine = build_grid(holes, self.n_fine, torus, check=False)
        return self.coef * eval_single_layer(self.density(fine), fine, z)


@dataclass(frozen=True)
class GreenSum:
    """sum_i coefs[i] G(z - centers[i]); Neumann data uses its normal derivative."""

    centers: tuple
    coefs: tuple

    def trace(self, grid, ops, kind):
        out = np.zeros(grid.n)
        pts = KernelPoint(grid.z, grid.normal)
        for a, c in zip(self.centers, self.coefs):
            if c:
                if kind == "neumann":
                    out += c * normal_deriv_target(pts, a, grid.torus)
                else:
                    out += c * green(grid.z - a, grid.torus)
        return out

    def field(self, z, kind, holes, torus):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape)
        for a, c in zip(self.centers, self.coefs):
            if c:
                out = out + c * green(z - a, torus)
        return out


@dataclass(frozen=True)
class Expression:
    """Data given directly by an expression; no known extension."""

    src: str

    def __post_init__(self):
        parse_expr(self.src)

    def trace(self, grid, ops, kind):
        return eval_on_grid(self.src, grid)

    field = None


@dataclass(frozen=True)
class Samples:
    """Nodal values supplied by the user (e.g. read from CSV)."""

    values: tuple

    def trace(self, grid, ops, kind):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (grid.n,):
            raise ConfigurationError(f"sampled boundary data has {v.size} values, grid has {grid.n} nodes")
        return v

    field = None


@dataclass(frozen=True, eq=False)
class Problem:
    """Dirichlet or Neumann problem: geometry, data terms and solver options."""

    kind: str
    holes: tuple
    torus: object
    terms: tuple = ()
    betas: tuple = None
    convention: str = "zero_mean"
    threads: int = 1
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in ("dirichlet", "neumann"):
            raise ConfigurationError(f"Problem supports dirichlet or neumann, not {self.kind!r}")

    def grid(self, n):
        key = ("grid", n if np.isscalar(n) else tuple(n))
        if key not in self._cache:
            self._cache[key] = build_grid(self.holes, n, self.torus)
        return self._cache[key]

    def data(self, grid, ops):
        g = np.zeros(grid.n)
        for term in self.terms:
            g += term.trace(grid, ops, self.kind)
        return g

    @property
    def has_exact(self):
        return bool(self.terms) and all(t.field is not None for t in self.terms)

    def exact_field(self, z):
        """The manufactured solution at z (defined up to a constant for Neumann)."""
        if not self.has_exact:
            raise ConfigurationError("boundary data has no known harmonic extension")
        z = np.asarray(z, dtype=complex)
        return sum(t.field(z, self.kind, self.holes, self.torus) for t in self.terms)

    @property
    def exact(self):
        return self.exact_field if self.has_exact else None

    @property
    def free_constant(self):
        return self.kind == "neumann"

    def solve(self, n, ops=None):
        grid = self.grid(n)
        ops = LayerOperators(grid, self.threads) if ops is None else ops
        g = self.data(grid, ops)
        if self.kind == "dirichlet":
            betas = None if self.betas is None else np.asarray(self.betas, dtype=complex)
            return solve_dirichlet(grid, g, betas, ops)
        return solve_neumann(grid, g, ops, convention=self.convention)

    def boundary_data(self, n):
        grid = self.grid(n)
        return self.data(grid, LayerOperators(grid, self.threads))
