"""Dirichlet, Neumann and Steklov solvers on a finitely-connected torus."""
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .exceptions import EigensolverFailure, NonZeroMeanData, SingularSystem
from .geometry import classify_points
from .green import green
from .operators import LayerOperators


@dataclass(frozen=True, eq=False)
class DirichletSolution:
    phi: np.ndarray
    fluxes: np.ndarray
    betas: np.ndarray
    grid: object
    condition: float = float("nan")


@dataclass(frozen=True, eq=False)
class NeumannSolution:
    """Density in C_0 plus the additive constant of u = S[phi] + constant.

    ``convention`` is ``"zero_mean"`` (boundary trace has zero mean) or
    ``"pinned"`` (u takes a prescribed value at a reference point).
    """

    phi: np.ndarray
    constant: float
    convention: str
    grid: object
    condition: float = float("nan")


@dataclass(frozen=True, eq=False)
class SteklovEigenpair:
    sigma: float
    phi: np.ndarray
    residual: float
    grid: object
    trace: np.ndarray = field(repr=False, default=None)
    normal_trace: np.ndarray = field(repr=False, default=None)


def _ops(grid, ops):
    if ops is None:
        return LayerOperators(grid)
    if ops.grid is not grid:
        raise ValueError("operators were assembled on a different grid")
    return ops


def _lu_solve(a, rhs):
    """Dense LU with partial pivoting; returns (solution, reciprocal condition estimate)."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", sla.LinAlgWarning)
        try:
            lu, piv = sla.lu_factor(a, check_finite=True)
        except (sla.LinAlgWarning, ValueError, np.linalg.LinAlgError) as exc:
            raise SingularSystem(f"LU factorization failed: {exc}") from exc
    anorm = np.linalg.norm(a, 1)
    rcond, info = sla.lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or not rcond > 100 * np.finfo(float).eps:
        raise SingularSystem(f"system is numerically singular (rcond={rcond:.3g})")
    return sla.lu_solve((lu, piv), rhs), 1.0 / rcond


def dirichlet_matrix(grid, betas, ops=None):
    """The (N+M) x (N+M) block matrix for density and fluxes (K - I/2 for M = 1)."""
    ops = _ops(grid, ops)
    n, m = grid.n, grid.n_holes
    a = ops.K.matrix - 0.5 * np.eye(n)
    if m == 1:
        return a
    big = np.zeros((n + m, n + m))
    big[:n, :n] = a
    big[:n, n:] = green(grid.z[:, None] - np.asarray(betas)[None, :], grid.torus)
    for j in range(m - 1):
        sl = grid.slice(j)
        big[n + j, sl] = grid.weights[sl]
    big[n + m - 1, n:] = 1.0
    return big


def default_betas(grid):
    return np.array([h.center for h in grid.holes])


def solve_dirichlet(grid, g, betas=None, ops=None):
    """Density phi and fluxes A_j with u = D[phi] + sum_j A_j G(. - beta_j)."""
    g = np.asarray(g, dtype=float)
    if g.shape != (grid.n,):
        raise ValueError(f"boundary data must have shape ({grid.n},), got {g.shape}")
    betas = default_betas(grid) if betas is None else np.asarray(betas, dtype=complex)
    if betas.shape != (grid.n_holes,):
        raise ValueError("need exactly one source point per hole")
    code, which = classify_points(betas, grid, band=0.0)
    if np.any(code != 1) or np.any(which != np.arange(grid.n_holes)):
        raise ValueError("each beta_j must lie inside hole j")
    a = dirichlet_matrix(grid, betas, ops)
    m = grid.n_holes
    if m == 1:
        phi, cond = _lu_solve(a, g)
        fluxes = np.zeros(1)
    else:
        sol, cond = _lu_solve(a, np.concatenate([g, np.zeros(m)]))
        phi, fluxes = sol[: grid.n], sol[grid.n :]
    return DirichletSolution(phi=phi, fluxes=fluxes, betas=betas, grid=grid, condition=cond)


def weighted_mean(grid, f):
    return float(np.sum(grid.weights * f) / np.sum(grid.weights))


def solve_neumann(grid, g, ops=None, mean_tol=1e-8, convention="zero_mean", pin=None):
    """Solve (K* + I/2) phi = g for zero-mean data g.

    With ``convention="pinned"``, ``pin=(z_ref, value)`` fixes u(z_ref) = value.
    """
    ops = _ops(grid, ops)
    g = np.asarray(g, dtype=float)
    scale = np.sum(grid.weights * np.abs(g))
    if abs(np.sum(grid.weights * g)) > mean_tol * max(scale, np.finfo(float).tiny):
        raise NonZeroMeanData(
            f"Neumann data has nonzero mean {weighted_mean(grid, g):.3e}; the problem needs int g = 0"
        )
    phi, cond = _lu_solve(ops.Kstar.matrix + 0.5 * np.eye(grid.n), g)
    phi = phi - weighted_mean(grid, phi)
    if convention == "zero_mean":
        constant = -weighted_mean(grid, ops.S.matrix @ phi)
    elif convention == "pinned":
        if pin is None:
            raise ValueError("pinned convention needs pin=(z_ref, value)")
        z_ref, value = pin
        constant = value - float(np.sum(green(z_ref - grid.z, grid.torus) * phi * grid.weights))
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return NeumannSolution(phi=phi, constant=constant, convention=convention, grid=grid, condition=cond)


def neumann_to_dirichlet(grid, g, ops=None):
    """Zero-mean Dirichlet trace (I - M) S (K* + I/2)^{-1} g."""
    ops = _ops(grid, ops)
    sol = solve_neumann(grid, g, ops)
    trace = ops.S.matrix @ sol.phi
    return trace - weighted_mean(grid, trace)


def steklov_matrices(grid, ops=None):
    """A = (K* + I/2)(I - M) and B = S0 of the generalized problem A phi = sigma B phi."""
    ops = _ops(grid, ops)
    eye = np.eye(grid.n)
    a = (ops.Kstar.matrix + 0.5 * eye) @ (eye - ops.M.matrix)
    return a, ops.S0.matrix


def solve_steklov(grid, k_max, ops=None, imag_tol=1e-8, neg_tol=1e-8):
    """Smallest ``k_max`` Steklov eigenpairs, sorted by sigma.

    Spurious modes (complex, negative or infinite eigenvalues) are discarded.
    Each density is scaled so the eigenfunction trace has unit discrete L2 norm.
    """
    if not 1 <= k_max <= grid.n:
        raise ValueError(f"k_max must be in [1, {grid.n}]")
    a, b = steklov_matrices(grid, ops)
    try:
        sigma, vecs = sla.eig(a, b, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverFailure(str(exc)) from exc
    finite = np.isfinite(sigma)
    real = np.abs(sigma.imag) <= imag_tol * (1 + np.abs(sigma.real))
    keep = finite & real & (sigma.real >= -neg_tol)
    order = np.flatnonzero(keep)[np.argsort(sigma.real[keep], kind="stable")]
    if order.size < k_max:
        raise EigensolverFailure(f"only {order.size} admissible eigenvalues, {k_max} requested")
    pairs = []
    for k in order[:k_max]:
        phi = vecs[:, k]
        # eigenvectors of real eigenvalues can carry an arbitrary complex phase
        phi = phi * np.exp(-1j * np.angle(phi[np.argmax(np.abs(phi))]))
        phi = phi.real
        trace = b @ phi
        norm = np.sqrt(np.sum(grid.weights * trace**2))
        phi, trace = phi / norm, trace / norm
        normal_trace = a @ phi
        s = float(sigma[k].real)
        resid = float(np.max(np.abs(normal_trace - s * trace)))
        pairs.append(SteklovEigenpair(s, phi, resid, grid, trace, normal_trace))
    return pairs


def steklov_flux(pair, grid, j):
    """Flux of the eigenfunction across the boundary of hole j."""
    sl = grid.slice(j)
    return float(np.sum(grid.weights[sl] * pair.normal_trace[sl]))
