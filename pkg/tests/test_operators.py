import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torus_bie import Hole, InvalidN, LayerOperators, Torus, build_grid, eval_double_layer
from torus_bie.operators import (
    DenseOperator,
    assemble_K,
    assemble_Kstar,
    assemble_S,
    assemble_X,
    apply_Kstar,
    apply_S,
    dump_matrix,
    kress_log_weights,
    load_matrix,
)

# mpmath: int_0^{2pi} log(4 sin^2((s - t)/2)) cos(3t) dt at s = 0.7
LOG_COS3_AT_07 = 1.0573472089362243292
# mpmath adaptive quadrature of int G(z_i - xi) cos(2t) |dxi| on the circle r = 0.2 about 0.5+0.5i, z_i = node 3 of 32
S_COS2_NODE3 = 0.019420076886541566753
# same on the equilateral torus with density sin t at node 5 of 32
S_SIN_NODE5_EQUILATERAL = 0.071045203981303677331


@pytest.fixture(scope="module")
def fig2(square, two_circles):
    grid = build_grid(two_circles, 100, square)
    return grid, LayerOperators(grid)


class TestKressWeights:
    def test_integrates_constant_to_zero(self):
        r = kress_log_weights(32)
        assert np.max(np.abs(r @ np.ones(32))) <= 1e-13

    def test_cos3(self):
        n = 32
        t = 2 * np.pi * np.arange(n) / n
        r = kress_log_weights(n)
        assert np.max(np.abs(r @ np.cos(3 * t) + 2 * np.pi / 3 * np.cos(3 * t))) <= 1e-13

    def test_against_quadrature_at_node(self):
        # node s = 0.7 is not equispaced, so shift the rule: exactness is translation invariant
        n = 32
        t = 0.7 + 2 * np.pi * np.arange(n) / n
        assert kress_log_weights(n)[0] @ np.cos(3 * t) == pytest.approx(LOG_COS3_AT_07, abs=1e-13)

    @pytest.mark.parametrize("m", [0, 1, 5, 15, 16])
    def test_exact_up_to_half(self, m):
        n = 32
        t = 2 * np.pi * np.arange(n) / n
        expected = 0 if m == 0 else -2 * np.pi / m * np.cos(m * t)
        assert np.max(np.abs(kress_log_weights(n) @ np.cos(m * t) - expected)) <= 1e-12

    def test_circulant(self):
        r = kress_log_weights(16)
        for k in range(1, 16):
            assert np.array_equal(np.roll(np.roll(r, k, 0), k, 1), r)

    @pytest.mark.parametrize("n", [3, 2, 7])
    def test_invalid(self, n):
        with pytest.raises(InvalidN):
            kress_log_weights(n)


class TestK:
    def test_gauss_example1(self, torus):
        grid = build_grid([Hole.circle(0.5 + 0.5j, 0.2)], 100, torus)
        k = LayerOperators(grid).K.matrix
        assert np.max(np.abs(k @ np.ones(grid.n) - (0.5 - grid.total_area / torus.b))) <= 1e-10

    def test_null_vector_two_circles(self, fig2):
        grid, ops = fig2
        phi = np.where(grid.hole_index == 0, grid.torus.b / grid.areas[0], -grid.torus.b / grid.areas[1])
        assert np.max(np.abs(ops.K.matrix @ phi - 0.5 * phi)) <= 1e-8

    def test_one_hole_no_null_space(self, square):
        grid = build_grid([Hole.circle(0.5 + 0.5j, 0.2)], 50, square)
        s = np.linalg.svd(LayerOperators(grid).K.matrix - 0.5 * np.eye(grid.n), compute_uv=False)
        assert s.min() > 1e-3

    def test_gauss_off_boundary(self, fig2):
        grid, _ = fig2
        frac = grid.total_area / grid.torus.b
        ones = np.ones(grid.n)
        assert abs(eval_double_layer(ones, grid, 0.5 + 0.85j) + frac) <= 1e-9
        assert np.max(np.abs(eval_double_layer(ones, grid, np.array([0.7 + 0.5j, 0.3 + 0.3j])) - (1 - frac))) <= 1e-9


class TestKstar:
    def test_discrete_adjoint(self, fig2):
        grid, ops = fig2
        w = grid.weights
        assert np.max(np.abs(w[:, None] * ops.Kstar.matrix - (ops.K.matrix.T * w[None, :]))) <= 1e-12

    def test_null_space_and_mean(self, fig2):
        grid, ops = fig2
        _, s, vt = np.linalg.svd(ops.Kstar.matrix - 0.5 * np.eye(grid.n))
        assert s[-1] <= 1e-8 and s[-2] > 1e-3
        psi = vt[-1]
        assert abs(np.sum(grid.weights * psi)) <= 1e-9 * np.linalg.norm(psi)


class TestS:
    def test_cross_hole_symmetry(self, fig2):
        grid, ops = fig2
        w = grid.weights
        sym = ops.S.matrix / w[None, :]
        a, b = grid.slice(0), grid.slice(1)
        assert np.max(np.abs(sym[a, b] - sym[b, a].T)) <= 1e-12

    def test_oracle_on_circle(self, square):
        grid = build_grid([Hole.circle(0.5 + 0.5j, 0.2)], 32, square)
        val = (LayerOperators(grid).S.matrix @ np.cos(2 * grid.t))[3]
        assert val == pytest.approx(S_COS2_NODE3, abs=1e-10)

    def test_oracle_equilateral(self, equilateral):
        grid = build_grid([Hole.circle(0.5 + 0.5j, 0.2)], 32, equilateral)
        val = (LayerOperators(grid).S.matrix @ np.sin(grid.t))[5]
        assert val == pytest.approx(S_SIN_NODE5_EQUILATERAL, abs=1e-10)

    def test_constant_on_holes_for_null_vector(self, fig2):
        grid, ops = fig2
        _, _, vt = np.linalg.svd(ops.Kstar.matrix - 0.5 * np.eye(grid.n))
        sp = ops.S.matrix @ vt[-1]
        for j in range(2):
            assert np.std(sp[grid.slice(j)]) <= 1e-7

    def test_spectral_convergence(self, square, three_trefoils):
        # S applied to smooth data: error against a 4x finer grid falls faster than any power
        ref_grid = build_grid(three_trefoils, 320, square)
        ref = LayerOperators(ref_grid).S.matrix @ np.cos(ref_grid.t)
        errs = []
        for n in (20, 40, 80):
            grid = build_grid(three_trefoils, n, square)
            val = LayerOperators(grid).S.matrix @ np.cos(grid.t)
            coarse_ref = ref.reshape(3, 320)[:, :: 320 // n].ravel()
            errs.append(np.max(np.abs(val - coarse_ref)))
        assert errs[2] < 1e-8
        rates = np.diff(np.log(errs))
        assert rates[1] < rates[0]


class TestMeanAndX:
    def test_m_projection(self, fig2):
        grid, ops = fig2
        m = ops.M.matrix
        assert np.allclose(m @ np.ones(grid.n), 1, atol=1e-15)
        assert np.max(np.abs(m @ m - m)) <= 1e-14

    def test_m_kills_zero_mean(self, square):
        grid = build_grid([Hole.circle(0.5 + 0.5j, 0.2)], 40, square)
        assert np.max(np.abs(LayerOperators(grid).M.matrix @ np.cos(grid.t))) <= 1e-13

    def test_x_single_hole_zero(self, square):
        grid = build_grid([Hole.circle(0.5 + 0.5j, 0.2)], 20, square)
        assert not np.any(assemble_X(grid).matrix)

    def test_x_structure(self, square, three_trefoils):
        grid = build_grid(three_trefoils, 30, square)
        x = assemble_X(grid).matrix
        v = x @ np.random.default_rng(0).normal(size=grid.n)
        for j in range(3):
            part = v[grid.slice(j)]
            assert np.ptp(part) <= 1e-14
        assert not np.any(v[grid.slice(2)])
        ones = x @ np.ones(grid.n)
        assert np.allclose(ones[grid.slice(0)], grid.perimeters[0]) and np.allclose(ones[grid.slice(1)], grid.perimeters[1])

    def test_injective(self, square, two_circles, three_trefoils):
        for holes in ([Hole.circle(0.5 + 0.5j, 0.2)], two_circles, three_trefoils):
            grid = build_grid(holes, 60, square)
            ops = LayerOperators(grid)
            s = np.linalg.svd(ops.K.matrix + ops.X.matrix - 0.5 * np.eye(grid.n), compute_uv=False)
            assert s.min() > 1e-6


class TestS0:
    def test_constants(self, fig2):
        grid, ops = fig2
        assert np.max(np.abs(ops.S0.matrix @ np.ones(grid.n) - 1)) <= 1e-12

    def test_zero_mean_branch(self, fig2):
        grid, ops = fig2
        phi = np.cos(grid.t)
        phi = phi - np.sum(grid.weights * phi) / grid.perimeter
        assert np.max(np.abs(ops.S0.matrix @ phi - ops.S.matrix @ phi)) <= 1e-13

    def test_example1_oracle(self, square):
        grid = build_grid([Hole.circle(0.5 + 0.5j, 0.2)], 32, square)
        # sin(arg(xi - a1)) = sin t has zero mean, so S0 reduces to S
        val = (LayerOperators(grid).S0.matrix @ np.sin(grid.t))[3]
        ref = (LayerOperators(build_grid(grid.holes, 128, square)).S.matrix @ np.sin(2 * np.pi * np.arange(128) / 128))[12]
        assert val == pytest.approx(ref, abs=1e-13)


class TestAssembly:
    @settings(max_examples=5, deadline=None)
    @given(st.integers(2, 6))
    def test_thread_count_bit_identical(self, threads):
        grid = build_grid([Hole.trefoil(c, 0.1) for c in (0.7 + 0.5j, 0.3 + 0.3j, 0)], 80, Torus.equilateral())
        for fn in (assemble_K, assemble_Kstar, assemble_S):
            assert np.array_equal(fn(grid, 1).matrix, fn(grid, threads).matrix)

    def test_immutable(self, fig2):
        _, ops = fig2
        with pytest.raises(ValueError):
            ops.K.matrix[0, 0] = 1.0

    def test_operator_composition(self, fig2):
        grid, ops = fig2
        comp = ops.K @ ops.M
        assert isinstance(comp, DenseOperator) and comp.kind == "composite" and comp.shape == (grid.n, grid.n)

    def test_dump_roundtrip(self, tmp_path, fig2):
        _, ops = fig2
        path = tmp_path / "k.bin"
        dump_matrix(ops.K, path)
        raw = path.read_bytes()
        assert np.frombuffer(raw[:16], dtype="<u8").tolist() == list(ops.K.shape)
        assert len(raw) == 16 + 8 * ops.K.matrix.size
        assert np.array_equal(load_matrix(path), ops.K.matrix)


@pytest.mark.parametrize("cols", [(), (3,)])
def test_blockwise_apply_matches_dense(fig2, cols):
    grid, ops = fig2
    x = np.random.default_rng(5).standard_normal((grid.n,) + cols)
    assert np.allclose(apply_S(grid, x), ops.S.matrix @ x, rtol=0, atol=1e-13)
    assert np.allclose(apply_Kstar(grid, x), ops.Kstar.matrix @ x, rtol=0, atol=1e-13)
