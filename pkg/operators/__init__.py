"""Operators module: grids, discrete operators, kernels and Hilbert matrices."""

from .grid import (
    Grid,
    QuadratureWeights,
    WeightingMode,
    make_grid,
    trapezoid_weights,
    multiplier_values,
)
from .discrete import (
    DENSE_ENTRY_LIMIT,
    Representation,
    DiscreteOperator,
    DenseOperator,
    TriangularPrefixOperator,
    KernelRowsOperator,
    DiagonalOperator,
    ProductOperator,
    GramKernelOperator,
    as_operator,
)
from .builders import build_J, build_BH, build_BM, build_composite_A, build_AstarA
from .kernels import partial_dilog, partial_dilog_array, kernel_k, kernel_matrix
from .hilbert import (
    HilbertTruncation,
    CholeskyFactor,
    hilbert_matrix,
    hilbert_cholesky,
    hilbert_rayleigh_quotient,
    hilbert_reference_eigenvalues,
)

__all__ = [
    "Grid",
    "QuadratureWeights",
    "WeightingMode",
    "make_grid",
    "trapezoid_weights",
    "multiplier_values",
    "DENSE_ENTRY_LIMIT",
    "Representation",
    "DiscreteOperator",
    "DenseOperator",
    "TriangularPrefixOperator",
    "KernelRowsOperator",
    "DiagonalOperator",
    "ProductOperator",
    "GramKernelOperator",
    "as_operator",
    "build_J",
    "build_BH",
    "build_BM",
    "build_composite_A",
    "build_AstarA",
    "partial_dilog",
    "partial_dilog_array",
    "kernel_k",
    "kernel_matrix",
    "HilbertTruncation",
    "CholeskyFactor",
    "hilbert_matrix",
    "hilbert_cholesky",
    "hilbert_rayleigh_quotient",
    "hilbert_reference_eigenvalues",
]
