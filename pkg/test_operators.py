"""
Operator Tests
Grids, quadrature weights and the discrete operators J, B^H, B^M, A and A*A.
"""

import numpy as np
import pytest

from operators import (
    DENSE_ENTRY_LIMIT,
    DenseOperator,
    ProductOperator,
    Representation,
    WeightingMode,
    build_AstarA,
    build_BH,
    build_BM,
    build_composite_A,
    build_J,
    make_grid,
    trapezoid_weights,
)
from spectra import full_svd
from utils.errors import InvalidArgumentError, OperatorSizeError


def _adjoint_gap(op, rng):
    x = rng.standard_normal(op.cols)
    y = rng.standard_normal(op.rows)
    gap = abs(np.dot(op.apply(x), y) - np.dot(x, op.adjoint_apply(y)))
    return gap / (np.linalg.norm(x) * np.linalg.norm(y))


class TestGrid:
    def test_two_points_are_the_endpoints(self):
        assert list(make_grid(2).points) == [0.0, 1.0]

    def test_uniform_five_points(self):
        assert list(make_grid(5).points) == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_large_grid_spacing(self):
        grid = make_grid(10000)
        assert grid.points[1] == 1 / 9999
        assert grid.points[2] == 2 / 9999
        assert grid.points[-1] == 1.0
        assert np.all(np.diff(grid.points) > 0)

    @pytest.mark.parametrize("n", [1, 0, -3, 2.5, True])
    def test_invalid_sizes(self, n):
        with pytest.raises(InvalidArgumentError):
            make_grid(n)

    def test_points_are_read_only(self):
        with pytest.raises(ValueError):
            make_grid(3).points[0] = 1.0


class TestTrapezoidWeights:
    def test_three_points(self):
        assert list(trapezoid_weights(make_grid(3)).weights) == [0.25, 0.5, 0.25]

    def test_constants_and_affine_functions_are_exact(self):
        grid = make_grid(37)
        weights = trapezoid_weights(grid)
        assert weights.integrate(np.ones(37)) == pytest.approx(1.0, abs=1e-15)
        assert weights.integrate(grid.points) == pytest.approx(0.5, abs=1e-15)
        assert weights.integrate(3.0 - 2.0 * grid.points) == pytest.approx(2.0, abs=1e-14)

    def test_square_within_second_order_error(self):
        grid = make_grid(101)
        assert trapezoid_weights(grid).integrate(grid.points ** 2) == pytest.approx(1 / 3, abs=1e-4)

    def test_mismatched_samples(self):
        with pytest.raises(InvalidArgumentError):
            trapezoid_weights(make_grid(4)).integrate(np.ones(5))


def test_weighting_mode_parse():
    assert WeightingMode.parse("paper") is WeightingMode.PAPER_FAITHFUL
    assert WeightingMode.parse("L2") is WeightingMode.L2_CONSISTENT
    assert WeightingMode.parse("l2_consistent") is WeightingMode.L2_CONSISTENT
    with pytest.raises(InvalidArgumentError):
        WeightingMode.parse("sobolev")


class TestIntegrationOperator:
    def test_representation_and_shape(self):
        op = build_J(make_grid(7), make_grid(5))
        assert op.representation is Representation.TRIANGULAR_PREFIX
        assert op.shape == (5, 7)

    def test_constant_input_integrates_to_s(self):
        grid = make_grid(101)
        out = build_J(grid, grid).apply(np.ones(101))
        # left endpoint weight h/2 is the only deviation from the exact integral
        assert np.all(np.abs(out - grid.points) <= 0.5 * grid.spacing + 1e-14)
        assert out[-1] == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("mode", ["paper", "l2"])
    def test_prefix_products_match_dense(self, mode, rng):
        op = build_J(make_grid(300), make_grid(240), mode)
        dense = op.to_dense()
        x = rng.standard_normal(300)
        y = rng.standard_normal(240)
        assert np.linalg.norm(op.apply(x) - dense @ x) <= 1e-13 * np.linalg.norm(dense @ x)
        assert np.linalg.norm(op.adjoint_apply(y) - dense.T @ y) <= 1e-13 * np.linalg.norm(dense.T @ y)

    def test_paper_entries(self):
        op = build_J(make_grid(3), make_grid(3))
        expected = np.array([[0.25, 0.0, 0.0], [0.25, 0.5, 0.0], [0.25, 0.5, 0.25]])
        np.testing.assert_array_equal(op.to_dense(), expected)

    def test_leading_singular_value_in_l2_mode(self):
        grid = make_grid(400)
        sigma_1 = full_svd(build_J(grid, grid, "l2"), k=1).sigma(1)
        assert sigma_1 == pytest.approx(2 / np.pi, rel=0.01)


class TestMomentOperator:
    def test_first_row_is_the_weights(self):
        op = build_BH(3, make_grid(3))
        assert list(op.to_dense()[0]) == [0.25, 0.5, 0.25]

    def test_zero_to_the_zero_is_one(self):
        op = build_BH(2, make_grid(4), "l2")
        assert op.to_dense()[0, 0] == pytest.approx(np.sqrt(1 / 6))
        assert op.to_dense()[1, 0] == 0.0

    def test_constant_input_gives_reciprocal_moments(self):
        out = build_BH(10, make_grid(1000)).apply(np.ones(1000))
        np.testing.assert_allclose(out, 1.0 / np.arange(1, 11), atol=1e-3)

    def test_block_products_match_dense(self, rng):
        op = build_BH(300, make_grid(200), chunk_rows=64)
        dense = op.to_dense()
        x = rng.standard_normal(200)
        assert np.linalg.norm(op.apply(x) - dense @ x) <= 1e-13 * np.linalg.norm(dense @ x)

    def test_l2_leading_value_below_sqrt_pi(self):
        grid = make_grid(1000)
        sigma_1 = full_svd(build_BH(1000, grid, "l2"), k=1).sigma(1)
        assert 1.4 <= sigma_1 < np.sqrt(np.pi)

    def test_rejects_zero_moments(self):
        with pytest.raises(InvalidArgumentError):
            build_BH(0, make_grid(5))


class TestMultiplicationOperator:
    def test_quartic_on_five_points(self):
        op = build_BM(4, make_grid(5))
        assert op.representation is Representation.DIAGONAL
        assert list(op.diagonal) == [0.0, 0.00390625, 0.0625, 0.31640625, 1.0]

    def test_constant_input_returns_diagonal(self):
        op = build_BM(4, make_grid(9))
        np.testing.assert_array_equal(op.apply(np.ones(9)), op.diagonal)

    @pytest.mark.parametrize("kappa", [0, -1.0, float("nan")])
    def test_invalid_exponent(self, kappa):
        with pytest.raises(InvalidArgumentError):
            build_BM(kappa, make_grid(5))


class TestCompositeOperator:
    def test_first_row(self):
        grid = make_grid(11)
        op = build_composite_A(4, grid)
        weights = trapezoid_weights(grid).weights
        np.testing.assert_array_equal(op.to_dense()[0], weights * (1.0 - grid.points))

    def test_constant_input(self):
        out = build_composite_A(10, make_grid(1000)).apply(np.ones(1000))
        np.testing.assert_allclose(out, 1.0 / np.arange(2, 12), atol=1e-5)

    def test_agrees_with_discrete_product_on_leading_values(self):
        grid = make_grid(1000)
        direct = full_svd(build_composite_A(1000, grid), k=10)
        product = full_svd(ProductOperator([build_BH(1000, grid), build_J(grid, grid)]), k=10)
        np.testing.assert_allclose(product.values, direct.values, rtol=0.05)


class TestAstarA:
    def test_symmetric_kernel_with_zero_row_at_one(self):
        grid = make_grid(60)
        for assembly in ("chunked", "dilog"):
            op = build_AstarA(grid, 200, assembly=assembly)
            kernel = op.kernel
            assert np.max(np.abs(kernel - kernel.T)) <= 1e-13 * np.max(kernel)
            assert np.max(np.abs(kernel[-1])) <= 1e-13

    def test_assembly_strategies_agree(self):
        grid = make_grid(40)
        chunked = build_AstarA(grid, 500, assembly="chunked").kernel
        split = build_AstarA(grid, 500, assembly="dilog").kernel
        np.testing.assert_allclose(split, chunked, atol=1e-11)

    def test_single_term_kernel(self):
        grid = make_grid(51)
        out = build_AstarA(grid, 1).apply(np.ones(51))
        np.testing.assert_allclose(out, 0.5 * (1.0 - grid.points), atol=1e-14)

    def test_entries_grow_with_truncation(self):
        grid = make_grid(30)
        previous = build_AstarA(grid, 10).kernel
        for j_max in (20, 100, 400):
            current = build_AstarA(grid, j_max).kernel
            assert np.all(current >= previous - 1e-15 * np.abs(current))
            previous = current

    def test_paper_weighting_is_symmetric_only_in_its_core(self):
        grid = make_grid(40)
        op = build_AstarA(grid, 200, "paper")
        dense, core = op.to_dense(), op.symmetric_dense()
        assert np.max(np.abs(dense - dense.T)) > 1e-6 * np.max(np.abs(dense))
        np.testing.assert_array_equal(core, core.T)
        eigenvalues = np.sort(np.linalg.eigvals(dense).real)[::-1][:5]
        np.testing.assert_allclose(eigenvalues, np.linalg.eigvalsh(core)[::-1][:5], rtol=1e-8)

    def test_l2_core_is_gram_of_composite(self):
        grid = make_grid(40)
        core = build_AstarA(grid, 200, "l2").to_dense()
        A = build_composite_A(200, grid, "l2").to_dense()
        np.testing.assert_allclose(core, A.T @ A, atol=1e-12)

    def test_matrix_free_matches_assembled(self, rng):
        grid = make_grid(80)
        dense = build_AstarA(grid, 300, "l2")
        streamed = build_AstarA(grid, 300, "l2", matrix_free=True)
        assert streamed.matrix_free
        x = rng.standard_normal(80)
        np.testing.assert_allclose(streamed.apply(x), dense.apply(x), rtol=1e-12, atol=1e-15)

    def test_unknown_assembly(self):
        with pytest.raises(InvalidArgumentError):
            build_AstarA(make_grid(5), 10, assembly="fft")


@pytest.mark.parametrize("factory", [
    lambda: build_J(make_grid(40), make_grid(30)),
    lambda: build_J(make_grid(40), make_grid(30), "l2"),
    lambda: build_BH(25, make_grid(40)),
    lambda: build_BM(4, make_grid(40)),
    lambda: build_composite_A(25, make_grid(40), "l2"),
    lambda: build_AstarA(make_grid(40), 100),
    lambda: build_AstarA(make_grid(40), 100, "l2", matrix_free=True),
    lambda: ProductOperator([build_BM(4, make_grid(30)), build_J(make_grid(40), make_grid(30))]),
])
def test_adjoint_consistency(factory, rng):
    assert _adjoint_gap(factory(), rng) <= 1e-12


def test_apply_checks_shapes():
    op = build_J(make_grid(4), make_grid(3))
    with pytest.raises(InvalidArgumentError):
        op.apply(np.ones(3))
    with pytest.raises(InvalidArgumentError):
        op.adjoint_apply(np.ones(4))


def test_product_requires_conformable_factors():
    with pytest.raises(InvalidArgumentError):
        ProductOperator([build_BM(2, make_grid(5)), build_J(make_grid(4), make_grid(4))])


def test_dense_assembly_limit():
    side = int(np.sqrt(DENSE_ENTRY_LIMIT)) + 1
    op = build_BH(side, make_grid(side))
    with pytest.raises(OperatorSizeError) as excinfo:
        op.to_dense()
    assert "lanczos" in str(excinfo.value)


def test_dense_operator_is_immutable():
    op = DenseOperator(np.eye(3))
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 2.0
