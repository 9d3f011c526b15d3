"""
Kernel Tests
Partial dilogarithm sums and the A*A kernel against direct summation.
"""

import math

import numpy as np
import pytest

from operators import kernel_k, kernel_matrix, partial_dilog, partial_dilog_array
from utils.errors import InvalidArgumentError


def _direct_dilog(x, j_max):
    return sum(x ** j / j ** 2 for j in range(1, j_max + 1))


def _direct_kernel(s, t, j_max):
    return sum((1 - s ** j) * (1 - t ** j) / j ** 2 for j in range(1, j_max + 1))


class TestPartialDilog:
    def test_zero(self):
        assert partial_dilog(0.0, 100) == 0.0

    def test_basel_limit(self):
        assert partial_dilog(1.0, None) == pytest.approx(math.pi ** 2 / 6, abs=1e-15)

    def test_partial_basel_sum(self):
        assert partial_dilog(1.0, 1000) == pytest.approx(_direct_dilog(1.0, 1000), rel=1e-14)

    def test_matches_direct_sum(self):
        assert abs(partial_dilog(0.5, 50, tol=1e-16) - _direct_dilog(0.5, 50)) <= 1e-15

    def test_full_series(self):
        # Li2(1/2) = π²/12 - ln²2 / 2
        expected = math.pi ** 2 / 12 - math.log(2) ** 2 / 2
        assert partial_dilog(0.5, None) == pytest.approx(expected, abs=1e-14)

    @pytest.mark.parametrize("x", [-0.1, 1.5, float("nan")])
    def test_outside_unit_interval(self, x):
        with pytest.raises(InvalidArgumentError):
            partial_dilog(x, 10)

    def test_equal_inputs_give_equal_outputs(self):
        values = partial_dilog_array(np.array([0.3, 0.999, 0.3, 0.0, 1.0, 0.999]), 5000)
        assert values[0] == values[2]
        assert values[1] == values[5]
        assert values[3] == 0.0

    def test_invalid_truncation(self):
        with pytest.raises(InvalidArgumentError):
            partial_dilog_array(np.array([0.5]), 0)


class TestKernel:
    def test_vanishes_at_s_equal_one(self):
        for t in (0.0, 0.3, 1.0):
            assert kernel_k(1.0, t, 500) == 0.0

    def test_origin_gives_basel_sum(self):
        assert kernel_k(0.0, 0.0, None) == pytest.approx(math.pi ** 2 / 6, abs=1e-14)

    def test_midpoint_matches_direct_sum(self):
        assert abs(kernel_k(0.5, 0.5, 100) - _direct_kernel(0.5, 0.5, 100)) <= 1e-12

    @pytest.mark.parametrize("j_max", [10, 100, 1000])
    def test_split_matches_direct_sum(self, j_max, rng):
        pairs = rng.uniform(0.0, 1.0, size=(100, 2))
        for s, t in pairs:
            assert abs(kernel_k(s, t, j_max) - _direct_kernel(s, t, j_max)) <= 1e-12

    def test_matrix_matches_pointwise(self):
        points = np.linspace(0.0, 1.0, 7)
        matrix = kernel_matrix(points, points, 300)
        for a in (0, 3, 6):
            for b in (1, 4):
                assert matrix[a, b] == pytest.approx(kernel_k(points[a], points[b], 300), abs=1e-13)
        np.testing.assert_array_equal(matrix, matrix.T)

    def test_rejects_arguments_outside_unit_square(self):
        with pytest.raises(InvalidArgumentError):
            kernel_k(0.5, 1.2, 10)
