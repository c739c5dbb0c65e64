"""Off-boundary evaluation, fluxes, a posteriori residuals and convergence studies."""
from dataclasses import dataclass

import numpy as np

from .geometry import classify_points, curve_eval
from .green import green, green_gradient_complex
from .operators import apply_Kstar, apply_S
from .solvers import (
    DirichletSolution,
    NeumannSolution,
    SteklovEigenpair,
    steklov_flux,
    weighted_mean,
)

_CHUNK = 256


def _chunked(z, fn):
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    out = np.empty(flat.shape)
    for s in range(0, flat.size, _CHUNK):
        out[s : s + _CHUNK] = fn(flat[s : s + _CHUNK])
    return out.reshape(z.shape)[()] if z.ndim == 0 else out.reshape(z.shape)


def eval_double_layer(phi, grid, z):
    """D[phi](z) by the trapezoid rule; inaccurate within a few node spacings of the boundary."""
    w = np.asarray(phi) * grid.weights

    def fn(zz):
        grad = green_gradient_complex(zz[:, None] - grid.z[None, :], grid.torus)
        return -(grad * np.conj(grid.normal[None, :])).real @ w

    return _chunked(z, fn)


def eval_single_layer(phi, grid, z):
    """S[phi](z) by the trapezoid rule."""
    w = np.asarray(phi) * grid.weights
    return _chunked(z, lambda zz: green(zz[:, None] - grid.z[None, :], grid.torus) @ w)


def eval_green_sum(z, centers, coefs, torus):
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape)
    for a, c in zip(centers, coefs):
        if c:
            out = out + c * green(z - a, torus)
    return out


def eval_solution(solution, z):
    """Evaluate the harmonic function represented by a solver result at z."""
    if isinstance(solution, DirichletSolution):
        grid = solution.grid
        return eval_double_layer(solution.phi, grid, z) + eval_green_sum(z, solution.betas, solution.fluxes, grid.torus)
    if isinstance(solution, NeumannSolution):
        return eval_single_layer(solution.phi, solution.grid, z) + solution.constant
    if isinstance(solution, SteklovEigenpair):
        mean = weighted_mean(solution.grid, solution.phi)
        return eval_single_layer(solution.phi - mean, solution.grid, z) + mean
    raise TypeError(f"cannot evaluate {type(solution).__name__}")


def flux(solution, grid, j):
    """Flux of the solution across the boundary of hole j."""
    if isinstance(solution, DirichletSolution):
        return float(solution.fluxes[j])
    if isinstance(solution, NeumannSolution):
        sl = grid.slice(j)
        return float(np.sum(grid.weights[sl] * solution.phi[sl]))
    if isinstance(solution, SteklovEigenpair):
        return steklov_flux(solution, grid, j)
    raise TypeError(f"no flux for {type(solution).__name__}")


def trig_interpolate(values, n_new):
    """Upsample a periodic, equispaced sample of even length to ``n_new`` points."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n_new < n:
        raise ValueError("trig_interpolate only refines")
    c = np.fft.rfft(values) / n
    if n % 2 == 0:
        c[-1] *= 0.5  # Nyquist mode becomes a +-n/2 pair on the finer grid
    out = np.zeros(n_new // 2 + 1, dtype=complex)
    out[: c.size] = c
    if n_new == n:
        out[-1] *= 2
    return np.fft.irfft(out * n_new, n_new)


def interpolate_density(phi, grid, fine):
    """Per-hole trigonometric interpolation of nodal values onto ``fine``."""
    return np.concatenate([trig_interpolate(phi[grid.slice(j)], fine.counts[j]) for j in range(grid.n_holes)])


def steklov_residuals(pairs, grid, factor=2, ops=None):
    """max |d_nu u_k - sigma_k u_k| for each pair, on a boundary sampling ``factor`` times finer.

    Densities are carried to the fine grid by trigonometric interpolation and
    both sides are applied with the fine-grid operators. ``ops`` may hold
    operators already assembled on the refined grid; without it the operators
    are applied block by block and never stored, which keeps memory at
    O(N) for large grids.
    """
    fine = grid.refined(factor) if ops is None else ops.grid
    if fine.counts != tuple(factor * c for c in grid.counts):
        raise ValueError("ops were not assembled on the refined grid")
    phi = np.column_stack([interpolate_density(p.phi, grid, fine) for p in pairs])
    sigma = np.array([p.sigma for p in pairs])
    # (I - M) phi removes the weighted mean; S0 = S (I - M) + M
    mean = fine.weights @ phi / np.sum(fine.weights)
    centred = phi - mean
    if ops is None:
        lhs = apply_Kstar(fine, centred) + 0.5 * centred
        rhs = apply_S(fine, centred) + mean
    else:
        lhs = ops.Kstar.matrix @ centred + 0.5 * centred
        rhs = ops.S.matrix @ centred + mean
    return [float(v) for v in np.max(np.abs(lhs - sigma * rhs), axis=0)]


def steklov_residual(pair, grid, factor=2, ops=None):
    return steklov_residuals([pair], grid, factor, ops)[0]


def limit_from_domain(fn, z0, nu, h0=1e-2, n_steps=5):
    """Extrapolate fn(z0 - h nu) to h = 0 from h = h0 / 2^k, k < n_steps.

    A polynomial of degree n_steps - 1 is fitted through the samples at each
    point, so fn should be smooth in h up to the boundary.
    """
    hs = h0 / 2.0 ** np.arange(n_steps)
    vals = np.array([fn(z0 - h * nu) for h in hs])
    return np.polyfit(hs, vals, n_steps - 1)[-1]


_ONE_SIDED = np.array([-25 / 12, 4, -3, 4 / 3, -1 / 4])


def normal_derivative_fd(fn, on_boundary, z0, nu, h=1e-3):
    """Fourth-order one-sided difference of fn along +nu, sampled on the -nu side."""
    vals = [on_boundary] + [fn(z0 - k * h * nu) for k in range(1, 5)]
    return -sum(c * v for c, v in zip(_ONE_SIDED, vals)) / h


def near_boundary_evaluator(solution, upsample=64):
    """eval_solution with the density carried to a grid ``upsample`` times finer.

    The trapezoid sum loses accuracy within a few node spacings of the
    boundary; refining the density by trigonometric interpolation pushes that
    layer inward by the same factor.
    """
    grid = solution.grid
    fine = grid.refined(upsample)
    phi = interpolate_density(solution.phi, grid, fine)
    if isinstance(solution, DirichletSolution):
        return lambda z: eval_double_layer(phi, fine, z) + eval_green_sum(z, solution.betas, solution.fluxes, grid.torus)
    if isinstance(solution, NeumannSolution):
        return lambda z: eval_single_layer(phi, fine, z) + solution.constant
    raise TypeError(f"cannot evaluate {type(solution).__name__}")


@dataclass(frozen=True, eq=False)
class FieldGrid:
    points: np.ndarray
    values: np.ndarray
    mask: np.ndarray  # 0 domain, 1 hole, 2 near boundary
    hole: np.ndarray


def field_points(torus, n):
    """n x n lattice-coordinate sample points over the fundamental cell."""
    s = (np.arange(n) + 0.5) / n
    u, v = np.meshgrid(s, s)
    return u + v * torus.tau


def sample_field(solution, n, band=None):
    grid = solution.grid
    pts = field_points(grid.torus, n)
    code, hole = classify_points(pts.ravel(), grid, band)
    vals = eval_solution(solution, pts)
    return FieldGrid(pts, vals, code.reshape(pts.shape), hole.reshape(pts.shape))


def contour_points(holes, n_points):
    """Points on test contours (Hole objects), ``n_points`` per contour."""
    t = 2 * np.pi * np.arange(n_points) / n_points
    return np.concatenate([curve_eval(h, t).position for h in holes])


@dataclass(frozen=True)
class ConvergenceResult:
    n_values: tuple
    errors: tuple
    slope: float
    fit_points: int


def fit_log_slope(n_values, errors, floor=1e-12):
    """Least-squares slope of log10(error) against N over the pre-plateau points.

    Points after the error first drops below ``floor`` are treated as the
    round-off plateau and excluded.
    """
    n = np.asarray(n_values, dtype=float)
    e = np.asarray(errors, dtype=float)
    below = np.flatnonzero(e < floor)
    stop = below[0] + 1 if below.size else n.size
    stop = max(stop, 2)
    coef = np.polyfit(n[:stop], np.log10(e[:stop]), 1)
    return float(coef[0]), int(stop)


def convergence_study(problem, n_values, test_points, n_ref=None, floor=1e-12):
    """Sup error on ``test_points`` for each N in ``n_values`` plus the fitted slope.

    The reference is ``problem.exact`` if available, otherwise a solve with
    ``n_ref`` (default 4 max N) nodes per hole. Problems with a free additive
    constant (``problem.free_constant``) are compared after removing the mean
    difference.
    """
    n_values = tuple(int(n) for n in n_values)
    if problem.exact is not None:
        ref = problem.exact(test_points)
    else:
        n_ref = n_ref or 4 * max(n_values)
        ref = eval_solution(problem.solve(n_ref), test_points)
    errors = []
    for n in n_values:
        diff = eval_solution(problem.solve(n), test_points) - ref
        if getattr(problem, "free_constant", False):
            diff = diff - np.mean(diff)
        errors.append(float(np.max(np.abs(diff))))
    slope, used = fit_log_slope(n_values, errors, floor)
    return ConvergenceResult(n_values, tuple(errors), slope, used)

