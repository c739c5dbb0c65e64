"""Dense Nystrom matrices for the boundary operators.

K and K* have kernels that extend continuously to the diagonal, so the plain
trapezoid rule is spectrally accurate. The single-layer kernel has a log
singularity which is split off per hole and integrated with Kress weights.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import elliptic
from .exceptions import InvalidN
from .green import diagonal_limit, green, green_gradient_complex

KINDS = ("K", "Kstar", "S", "S0", "X", "M", "composite")


@dataclass(frozen=True, eq=False)
class DenseOperator:
    matrix: np.ndarray
    kind: str
    fingerprint: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        self.matrix.setflags(write=False)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __matmul__(self, other):
        if isinstance(other, DenseOperator):
            return DenseOperator(self.matrix @ other.matrix, "composite", self.fingerprint)
        return self.matrix @ other

    @property
    def shape(self):
        return self.matrix.shape


def _fill_rows(n_rows, n_cols, block, threads=1, chunk=64):
    """Fill an n_rows x n_cols matrix from ``block(rows) -> array``.

    Each entry is computed independently, so the result does not depend on the
    thread count.
    """
    out = np.empty((n_rows, n_cols))
    starts = range(0, n_rows, chunk)

    def work(s):
        rows = slice(s, min(s + chunk, n_rows))
        out[rows] = block(rows)

    if threads <= 1:
        for s in starts:
            work(s)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, starts))
    return out


def _diff_matrix(grid, rows):
    d = grid.z[rows, None] - grid.z[None, :]
    # placeholder on the diagonal; overwritten by callers
    idx = np.arange(grid.n)[rows]
    d[np.arange(d.shape[0]), idx] = 0.5 + 0.25 * grid.torus.tau
    return d, idx


def assemble_K(grid, threads=1):
    """Double-layer operator: (i, j) -> dG(z_i - z_j)/d(nu_j) w_j."""
    def block(rows):
        d, idx = _diff_matrix(grid, rows)
        grad = green_gradient_complex(d, grid.torus)
        m = -(grad * np.conj(grid.normal[None, :])).real * grid.weights[None, :]
        m[np.arange(len(idx)), idx] = diagonal_limit(grid.curvature[idx]) * grid.weights[idx]
        return m

    return DenseOperator(_fill_rows(grid.n, grid.n, block, threads), "K", grid.fingerprint)


def _kstar_rows(grid):
    def block(rows):
        d, idx = _diff_matrix(grid, rows)
        grad = green_gradient_complex(d, grid.torus)
        m = (grad * np.conj(grid.normal[rows, None])).real * grid.weights[None, :]
        m[np.arange(len(idx)), idx] = diagonal_limit(grid.curvature[idx]) * grid.weights[idx]
        return m

    return block


def assemble_Kstar(grid, threads=1):
    """Adjoint double-layer operator: (i, j) -> dG(z_i - z_j)/d(nu_i) w_j."""
    return DenseOperator(_fill_rows(grid.n, grid.n, _kstar_rows(grid), threads), "Kstar", grid.fingerprint)


def kress_log_weights(n):
    """Weights R with sum_j R[i, j] f(t_j) ~ int_0^{2pi} log(4 sin^2((t_i - t)/2)) f(t) dt.

    Exact for trigonometric polynomials of degree <= n/2 at the equispaced
    nodes t_j = 2 pi j / n.
    """
    if n < 4 or n % 2:
        raise InvalidN(f"Kress weights need an even n >= 4, got {n}")
    half = n // 2
    d = 2 * np.pi * np.arange(n) / n
    m = np.arange(1, half)
    row = -(4 * np.pi / n) * np.sum(np.cos(np.outer(d, m)) / m, axis=1)
    row -= (4 * np.pi / n**2) * np.cos(half * d)
    k = np.arange(n)
    return row[(k[:, None] - k[None, :]) % n]


def _s_rows(grid):
    torus = grid.torus
    c = elliptic.log_abs_theta1_prime_at_zero(torus)
    kress = {n: kress_log_weights(n) for n in set(grid.counts)}

    def block(rows):
        d, idx = _diff_matrix(grid, rows)
        g = green(d, torus)
        m = g * grid.weights[None, :]
        for j in range(grid.n_holes):
            sl = grid.slice(j)
            r = np.flatnonzero((idx >= sl.start) & (idx < sl.stop))
            if r.size == 0:
                continue
            ii = idx[r] - sl.start
            diff = grid.t[idx[r]][:, None] - grid.t[sl][None, :]
            on_diag = ii[:, None] == np.arange(grid.counts[j])[None, :]
            with np.errstate(divide="ignore", invalid="ignore"):
                logpart = np.log(4 * np.sin(diff / 2) ** 2) / (4 * np.pi)
            speed = grid.speed[None, sl]
            rem = np.where(on_diag, -(np.log(speed) + c) / (2 * np.pi), g[r, sl] + logpart)
            m[r, sl] = -kress[grid.counts[j]][ii] * speed / (4 * np.pi) + rem * grid.weights[None, sl]
        return m

    return block


def assemble_S(grid, threads=1):
    """Single-layer operator with the log singularity handled on same-hole blocks."""
    return DenseOperator(_fill_rows(grid.n, grid.n, _s_rows(grid), threads), "S", grid.fingerprint)


def _apply_rows(block, n, x, chunk=256):
    out = np.empty((n,) + x.shape[1:])
    for s in range(0, n, chunk):
        rows = slice(s, min(s + chunk, n))
        m = block(rows)
        # column by column so each result is independent of the batch
        out[rows] = m @ x if x.ndim == 1 else np.column_stack([m @ col for col in x.T])
    return out


def apply_Kstar(grid, x):
    """K* @ x without storing the matrix; x may hold several columns."""
    return _apply_rows(_kstar_rows(grid), grid.n, np.asarray(x, dtype=float))


def apply_S(grid, x):
    """S @ x without storing the matrix; x may hold several columns."""
    return _apply_rows(_s_rows(grid), grid.n, np.asarray(x, dtype=float))


def assemble_M(grid):
    w = grid.weights / np.sum(grid.weights)
    return DenseOperator(np.tile(w, (grid.n, 1)), "M", grid.fingerprint)


def assemble_X(grid):
    m = np.zeros((grid.n, grid.n))
    for j in range(grid.n_holes - 1):
        sl = grid.slice(j)
        m[sl, sl] = grid.weights[None, sl]
    return DenseOperator(m, "X", grid.fingerprint)


def assemble_S0(grid, S=None, M=None):
    S = assemble_S(grid) if S is None else S
    M = assemble_M(grid) if M is None else M
    eye = np.eye(grid.n)
    return DenseOperator(S.matrix @ (eye - M.matrix) + M.matrix, "S0", grid.fingerprint)


class LayerOperators:
    """Lazily assembled operators on one grid; each is built at most once."""

    def __init__(self, grid, threads=1):
        self.grid = grid
        self.threads = threads

    @cached_property
    def K(self):
        return assemble_K(self.grid, self.threads)

    @cached_property
    def Kstar(self):
        return assemble_Kstar(self.grid, self.threads)

    @cached_property
    def S(self):
        return assemble_S(self.grid, self.threads)

    @cached_property
    def M(self):
        return assemble_M(self.grid)

    @cached_property
    def X(self):
        return assemble_X(self.grid)

    @cached_property
    def S0(self):
        return assemble_S0(self.grid, self.S, self.M)


def dump_matrix(op, path):
    """Write a matrix as two little-endian uint64 dims followed by float64 row-major data."""
    a = np.ascontiguousarray(np.asarray(op, dtype="<f8"))
    with open(path, "wb") as fh:
        fh.write(np.array(a.shape, dtype="<u8").tobytes())
        fh.write(a.tobytes(order="C"))


def load_matrix(path):
    with open(path, "rb") as fh:
        rows, cols = np.frombuffer(fh.read(16), dtype="<u8")
        return np.frombuffer(fh.read(), dtype="<f8").reshape(int(rows), int(cols)).copy()
