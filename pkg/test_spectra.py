"""
Spectrum Engine Tests
Spectrum invariants, numerical rank, dense SVD, symmetric eigenvalues and
engine dispatch.
"""

import numpy as np
import pytest

from operators import build_BM, build_J, make_grid
from spectra import (
    Spectrum,
    SpectrumMethod,
    compute_spectrum,
    diagonal_spectrum,
    full_svd,
    numerical_rank,
    sym_eigs,
)
from utils.errors import InvalidArgumentError, OperatorSizeError, RangeError


class TestSpectrum:
    def test_build_computes_rank(self):
        spectrum = Spectrum.build([1.0, 1e-20], SpectrumMethod.DENSE_SVD, 2, 2)
        assert spectrum.numerical_rank == 1
        assert spectrum.tolerance == pytest.approx(2 * np.finfo(float).eps)

    @pytest.mark.parametrize("values", [[1.0, 2.0], [1.0, -0.5]])
    def test_rejects_unsorted_or_negative(self, values):
        with pytest.raises(InvalidArgumentError):
            Spectrum.build(values, SpectrumMethod.DENSE_SVD, 2, 2)

    def test_length_must_match_request(self):
        with pytest.raises(InvalidArgumentError):
            Spectrum.build([3.0, 2.0, 1.0], SpectrumMethod.DENSE_SVD, 5, 4, requested_k=2)

    def test_sigma_is_one_based(self):
        spectrum = Spectrum.build([3.0, 2.0, 1.0], SpectrumMethod.DENSE_SVD, 3, 3)
        assert spectrum.sigma(1) == 3.0
        assert spectrum.sigma(3) == 1.0
        with pytest.raises(RangeError):
            spectrum.sigma(0)
        with pytest.raises(RangeError):
            spectrum.sigma(4)

    def test_prefix_keeps_provenance(self):
        spectrum = Spectrum.build([3.0, 2.0, 1.0], SpectrumMethod.DENSE_SVD, 3, 4, metadata={"operator": "X"})
        head = spectrum.prefix(2)
        assert list(head.values) == [3.0, 2.0]
        assert head.metadata["operator"] == "X"
        assert head.tolerance == spectrum.tolerance

    def test_values_are_read_only(self):
        spectrum = Spectrum.build([1.0], SpectrumMethod.DENSE_SVD, 1, 1)
        with pytest.raises(ValueError):
            spectrum.values[0] = 2.0

    def test_to_dict(self):
        spectrum = Spectrum.build([2.0, 1.0], SpectrumMethod.LANCZOS_PARTIAL, 4, 3, requested_k=2,
                                  converged=[True, False])
        data = spectrum.to_dict()
        assert data["method"] == "LanczosPartial"
        assert data["unconverged"] == 1
        assert data["values"] == [2.0, 1.0]
        assert "values" not in spectrum.to_dict(include_values=False)


class TestNumericalRank:
    def test_identity(self):
        assert numerical_rank(full_svd(np.eye(5))) == 5

    def test_all_zero_spectrum(self):
        assert numerical_rank(full_svd(np.zeros((3, 4)))) == 0

    def test_custom_tolerance(self):
        spectrum = Spectrum.build([1.0, 1e-3, 1e-6], SpectrumMethod.DENSE_SVD, 3, 3)
        assert numerical_rank(spectrum, 1e-4) == 2
        assert numerical_rank(spectrum, 0.0) == 3

    def test_empty_spectrum(self):
        empty = Spectrum.build([], SpectrumMethod.DENSE_SVD, 3, 3, requested_k=0)
        with pytest.raises(InvalidArgumentError):
            numerical_rank(empty)


class TestFullSvd:
    def test_identity(self):
        assert list(full_svd(np.eye(5)).values) == [1.0] * 5

    def test_diagonal_is_rearranged(self):
        np.testing.assert_allclose(full_svd(np.diag([3.0, 1.0, 2.0])).values, [3.0, 2.0, 1.0], rtol=1e-15)

    def test_truncation(self):
        spectrum = full_svd(np.diag([4.0, 3.0, 2.0, 1.0]), k=2)
        assert len(spectrum) == 2
        assert spectrum.requested_k == 2

    def test_backward_stable_on_small_matrices(self, rng):
        A = rng.standard_normal((30, 20))
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
        np.testing.assert_allclose(full_svd(A).values, s, rtol=1e-13)
        assert np.linalg.norm(A - (U * s) @ Vt, 2) <= 10 * 30 * np.finfo(float).eps * s[0]

    def test_scale_equivariance(self, rng):
        A = rng.standard_normal((25, 18))
        np.testing.assert_allclose(full_svd(-0.3 * A).values, 0.3 * full_svd(A).values, rtol=1e-13)

    def test_refuses_oversized_operators(self):
        grid = make_grid(5000)
        with pytest.raises(OperatorSizeError) as excinfo:
            full_svd(build_J(grid, grid))
        assert "lanczos_topk" in str(excinfo.value)

    def test_metadata_from_operator(self):
        spectrum = full_svd(build_J(make_grid(10), make_grid(8), "l2"))
        assert spectrum.metadata["operator"] == "J"
        assert spectrum.metadata["weighting"] == "l2"
        assert (spectrum.rows, spectrum.cols) == (8, 10)


class TestSymEigs:
    def test_matches_full_svd_on_spd_input(self):
        H = 1.0 / (np.arange(1, 4)[:, None] + np.arange(1, 4)[None, :] - 1.0)
        np.testing.assert_allclose(sym_eigs(H).values, full_svd(H).values, rtol=1e-12)

    def test_zero_matrix(self):
        assert list(sym_eigs(np.zeros((4, 4))).values) == [0.0] * 4

    def test_negative_roundoff_is_clamped(self):
        spectrum = sym_eigs(np.diag([1.0, -1e-20, 0.5]))
        assert list(spectrum.values) == [1.0, 0.5, 0.0]
        assert spectrum.metadata["clamped"] == 1

    def test_rejects_asymmetric_input(self):
        with pytest.raises(InvalidArgumentError) as excinfo:
            sym_eigs(np.array([[1.0, 2.0], [2.1, 1.0]]))
        assert "asymmetry" in str(excinfo.value)

    def test_rejects_rectangular_input(self):
        with pytest.raises(InvalidArgumentError):
            sym_eigs(np.ones((2, 3)))


def test_engine_agreement_on_random_matrix(rng):
    A = rng.standard_normal((100, 80))
    dense = full_svd(A, k=10).values
    gram = np.sqrt(sym_eigs(A.T @ A, k=10).values)
    lanczos = compute_spectrum(A, engine="lanczos", k=10).values
    np.testing.assert_allclose(gram, dense, rtol=1e-8)
    np.testing.assert_allclose(lanczos, dense, rtol=1e-8)


class TestComputeSpectrum:
    def test_diagonal_operators_use_the_exact_rearrangement(self):
        spectrum = compute_spectrum(build_BM(4, make_grid(5)))
        assert spectrum.method is SpectrumMethod.DIAGONAL_EXACT
        assert list(spectrum.values) == [1.0, 0.31640625, 0.0625, 0.00390625, 0.0]

    def test_small_operators_go_dense(self):
        spectrum = compute_spectrum(build_J(make_grid(50), make_grid(50)), k=5)
        assert spectrum.method is SpectrumMethod.DENSE_SVD

    def test_large_operators_go_iterative(self):
        grid = make_grid(5000)
        spectrum = compute_spectrum(build_J(grid, grid, "l2"), k=3)
        assert spectrum.method is SpectrumMethod.LANCZOS_PARTIAL
        assert all(spectrum.converged)
        assert spectrum.sigma(1) == pytest.approx(2 / np.pi, rel=0.01)

    def test_unknown_engine(self):
        with pytest.raises(InvalidArgumentError):
            compute_spectrum(np.eye(3), engine="arpack")

    def test_diagonal_spectrum_requires_diagonal(self):
        with pytest.raises(InvalidArgumentError):
            diagonal_spectrum(build_J(make_grid(4), make_grid(4)))
