"""
Convergence and Diagnostics Tests
Level sweeps of singular values and the proportionality ratio table.
"""

import math

import numpy as np
import pytest

from analysis import convergence_study, multiplication_sigma, proportionality_diagnostic
from operators import build_BM, hilbert_matrix, make_grid
from spectra import Spectrum, SpectrumMethod, diagonal_spectrum, full_svd
from utils.errors import InvalidArgumentError


def _spectrum(values):
    return Spectrum.build(values, SpectrumMethod.DENSE_SVD, len(values), len(values))


class TestConvergenceStudy:
    def test_hilbert_singular_values_increase(self):
        levels = [20, 40, 80, 160]
        spectra = [full_svd(hilbert_matrix(n, exact=False).matrix) for n in levels]
        study = convergence_study(levels, spectra, [1, 2, 3], parameter="n")
        assert study.all_monotone
        assert all(value <= math.pi for value in study.values.ravel())
        assert study.values.shape == (4, 3)

    def test_multiplication_sweep_matches_closed_form(self):
        levels = [100, 400, 1600, 6400]
        spectra = [diagonal_spectrum(build_BM(4, make_grid(K))) for K in levels]
        study = convergence_study(levels, spectra, [10], parameter="K")
        expected = [multiplication_sigma(4, K, 10) for K in levels]
        assert list(study.sequence(10)) == expected
        assert study.monotone[10]
        assert study.limit_candidate[10] == expected[-1]

    def test_constant_spectra_are_monotone(self):
        spectra = [_spectrum([2.0, 1.0])] * 3
        study = convergence_study([1, 2, 3], spectra, [1, 2])
        assert study.all_monotone
        assert study.relative_last_step == {1: 0.0, 2: 0.0}

    def test_decrease_is_flagged(self):
        study = convergence_study([10, 20], [_spectrum([2.0, 1.0]), _spectrum([2.0, 0.5])], [1, 2])
        assert study.monotone == {1: True, 2: False}
        assert study.relative_last_step[2] == pytest.approx(1.0)

    def test_rows_are_level_major(self):
        study = convergence_study([1, 5], [_spectrum([3.0, 1.0]), _spectrum([4.0, 2.0])], [1, 2])
        assert list(study.rows()) == [(1, 1, 3.0), (1, 2, 1.0), (5, 1, 4.0), (5, 2, 2.0)]
        assert study.to_dict()["monotone"] == {"1": True, "2": True}

    def test_uncovered_index(self):
        with pytest.raises(InvalidArgumentError):
            convergence_study([1, 2], [_spectrum([1.0]), _spectrum([1.0, 0.5])], [2])

    @pytest.mark.parametrize("levels", [[5], [5, 5], [6, 5]])
    def test_invalid_levels(self, levels):
        spectra = [_spectrum([1.0])] * len(levels)
        with pytest.raises(InvalidArgumentError):
            convergence_study(levels, spectra, [1])

    def test_untracked_sequence(self):
        study = convergence_study([1, 2], [_spectrum([1.0, 0.5])] * 2, [1])
        with pytest.raises(InvalidArgumentError):
            study.sequence(2)


class TestProportionality:
    def test_diagonal_product_has_unit_ratios(self):
        d1 = np.array([4.0, 3.0, 2.0, 1.0])
        d2 = np.array([2.0, 1.5, 1.0, 0.5])
        table = proportionality_diagnostic(full_svd(np.diag(d1 * d2)), full_svd(np.diag(d1)), full_svd(np.diag(d2)))
        np.testing.assert_allclose(table.ratios, 1.0, rtol=1e-14)
        assert table.geometric_mean == pytest.approx(1.0, rel=1e-14)
        assert table.excluded == ()

    def test_zero_denominators_are_excluded(self):
        table = proportionality_diagnostic(_spectrum([1.0, 0.5, 0.1]), _spectrum([1.0, 1.0, 0.0]),
                                           _spectrum([2.0, 1.0, 1.0]))
        assert table.indices == (1, 2)
        assert table.excluded == (3,)
        assert table.minimum == 0.5
        assert table.maximum == 0.5

    def test_range_outside_overlap(self):
        with pytest.raises(InvalidArgumentError):
            proportionality_diagnostic(_spectrum([1.0, 0.5]), _spectrum([1.0]), _spectrum([1.0, 0.5]), (1, 2))

    def test_empty_range(self):
        with pytest.raises(InvalidArgumentError):
            proportionality_diagnostic(_spectrum([1.0, 0.5]), _spectrum([1.0, 0.5]), _spectrum([1.0, 0.5]), (2, 1))
