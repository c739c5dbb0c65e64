"""Property checks that need no reference data: theta identities, Gauss' lemma,
jump relations, null-space dimensions and the single-layer null vector. Used by ``torus-bie selftest``.
"""
from dataclasses import dataclass

import numpy as np

from .elliptic import Torus, theta1
from .fields import eval_double_layer, limit_from_domain, near_boundary_evaluator, normal_derivative_fd
from .geometry import Hole, build_grid
from .green import green
from .operators import LayerOperators
from .solvers import solve_dirichlet, solve_neumann


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _tori():
    return {"square": Torus.square(), "equilateral": Torus.equilateral()}


def _sample(torus, n=100, seed=0):
    u, v = np.random.default_rng(seed).uniform(-0.5, 0.5, size=(2, n))
    return u + v * torus.tau


def theta_quasi_periodicity():
    worst = 0.0
    for torus in _tori().values():
        z = _sample(torus)
        th = theta1(z, torus)
        scale = np.maximum(1, np.abs(th))
        e1 = np.abs(theta1(z + 1, torus) + th) / scale
        tt = theta1(z + torus.tau, torus)
        et = np.abs(tt + np.exp(-2j * np.pi * z) * th / torus.q) / np.maximum(1, np.abs(tt))
        eo = np.abs(theta1(-z, torus) + th) / scale
        worst = max(worst, e1.max(), et.max(), eo.max())
    return CheckResult("theta quasi-periodicity", worst <= 1e-12, f"max relative defect {worst:.2e}")


def green_symmetries():
    worst = 0.0
    for torus in _tori().values():
        z = _sample(torus, seed=1)
        z = z[np.abs(z) > 0.05]
        g = green(z, torus)
        worst = max(
            worst,
            np.max(np.abs(green(-z, torus) - g)),
            np.max(np.abs(green(z + 1, torus) - g)),
            np.max(np.abs(green(z + torus.tau, torus) - g)),
        )
    return CheckResult("G periodicity and evenness", worst <= 1e-12, f"max defect {worst:.2e}")


def _fig2_holes():
    return [Hole.circle(0.7 + 0.5j, 0.1), Hole.circle(0.3 + 0.3j, 0.15)]


def gauss_lemma(n=100):
    torus = Torus.square()
    grid = build_grid(_fig2_holes(), n, torus)
    ops = LayerOperators(grid)
    frac = grid.total_area / torus.b
    ones = np.ones(grid.n)
    e_bdry = np.max(np.abs(ops.K.matrix @ ones - (0.5 - frac)))
    e_out = abs(eval_double_layer(ones, grid, 0.5 + 0.85j) + frac)
    e_in = np.max(np.abs(eval_double_layer(ones, grid, np.array([0.7 + 0.5j, 0.3 + 0.3j])) - (1 - frac)))
    worst = max(e_bdry, e_out, e_in)
    return CheckResult("Gauss lemma (boundary, domain, hole)", worst <= 1e-9, f"max defect {worst:.2e}")


def null_space_counts(n=60):
    torus = Torus.square()
    geoms = {
        1: [Hole.circle(0.5 + 0.5j, 0.2)],
        2: _fig2_holes(),
        3: [Hole.trefoil(c, 0.1) for c in (0.7 + 0.5j, 0.3 + 0.3j, 0)],
    }
    bad = []
    for m, holes in geoms.items():
        grid = build_grid(holes, n, torus)
        ops = LayerOperators(grid)
        eye = np.eye(grid.n)
        k_minus = int(np.sum(np.linalg.svd(ops.K.matrix - 0.5 * eye, compute_uv=False) < 1e-6))
        ks_plus = int(np.sum(np.linalg.svd(ops.Kstar.matrix + 0.5 * eye, compute_uv=False) < 1e-6))
        if k_minus != m - 1 or ks_plus != 0:
            bad.append(f"M={m}: dim N(K-I/2)={k_minus}, dim N(K*+I/2)={ks_plus}")
    return CheckResult("null-space dimensions", not bad, "; ".join(bad) or "M-1 and 0 for M = 1, 2, 3")


def _jump_geometries():
    return {
        "two circles": _fig2_holes(),
        "three trefoils": [Hole.trefoil(c, 0.1) for c in (0.7 + 0.5j, 0.3 + 0.3j, 0)],
    }


def dirichlet_jump(n=100):
    """Domain-side limit of the solved Dirichlet field reproduces g."""
    torus = Torus.square()
    worst = 0.0
    for holes in _jump_geometries().values():
        grid = build_grid(holes, n, torus)
        g = np.cos(2 * np.pi * grid.z.real) * np.exp(grid.z.imag) + grid.hole_index
        sol = solve_dirichlet(grid, g)
        idx = np.arange(0, grid.n, 7)
        lim = limit_from_domain(near_boundary_evaluator(sol), grid.z[idx], grid.normal[idx])
        worst = max(worst, np.max(np.abs(lim - g[idx])))
    return CheckResult("Dirichlet jump relation", worst <= 1e-6, f"max defect {worst:.2e}")


def neumann_jump(n=100):
    """Normal derivative of the solved single-layer field matches (K* + I/2) phi."""
    torus = Torus.square()
    worst = 0.0
    for holes in _jump_geometries().values():
        grid = build_grid(holes, n, torus)
        ops = LayerOperators(grid)
        psi = np.cos(grid.t) + 0.3 * (grid.hole_index + 1) * np.sin(2 * grid.t)
        sol = solve_neumann(grid, ops.Kstar.matrix @ psi + 0.5 * psi, ops)
        idx = np.arange(0, grid.n, 7)
        on = (ops.S.matrix @ sol.phi)[idx] + sol.constant
        dn = normal_derivative_fd(near_boundary_evaluator(sol, 32), on, grid.z[idx], grid.normal[idx])
        worst = max(worst, np.max(np.abs(dn - (ops.Kstar.matrix @ sol.phi + 0.5 * sol.phi)[idx])))
    return CheckResult("Neumann jump relation", worst <= 1e-4, f"max defect {worst:.2e}")


S1_REFERENCE = (-0.1856, 0.1290)


def single_layer_constants(n=100):
    """Per-hole values of S[psi_1], psi_1 spanning the null space of K* - I/2 on the two-circle geometry.

    psi_1 is scaled to Euclidean norm sqrt(2 N) with the sign making the first
    entry negative. Returns (values, within-hole spread).
    """
    grid = build_grid(_fig2_holes(), n, Torus.square())
    ops = LayerOperators(grid)
    _, _, vt = np.linalg.svd(ops.Kstar.matrix - 0.5 * np.eye(grid.n))
    psi = vt[-1] * np.sqrt(2 * grid.n)
    sp = ops.S.matrix @ psi
    if sp[grid.slice(0)].mean() > 0:
        sp = -sp
    per_hole = [sp[grid.slice(j)] for j in range(grid.n_holes)]
    return np.array([v.mean() for v in per_hole]), max(v.std() for v in per_hole)


def single_layer_null_vector():
    s1, spread = single_layer_constants()
    err = np.max(np.abs(s1 - S1_REFERENCE))
    ok = err <= 1e-3 and spread <= 1e-7
    return CheckResult("S[psi_1] constant per hole", ok, f"s_1 = ({s1[0]:.5f}, {s1[1]:.5f}), spread {spread:.1e}")


CHECKS = (
    theta_quasi_periodicity,
    green_symmetries,
    gauss_lemma,
    null_space_counts,
    dirichlet_jump,
    neumann_jump,
    single_layer_null_vector,
)


def run_all():
    return [check() for check in CHECKS]
