"""
Operator Builders
Discretizations of the integration operator J, the Hausdorff moment
operator B^H, the multiplication operator B^M, the composition A = B^H∘J
and the Fredholm operator A*A, all with the trapezoidal rule.
"""

from typing import Any, Dict, Union
import logging
import numbers

import numpy as np

from operators.discrete import (
    DEFAULT_CHUNK_ROWS,
    DiagonalOperator,
    GramKernelOperator,
    KernelRowsOperator,
    TriangularPrefixOperator,
    check_dense_size,
)
from operators.grid import Grid, WeightingMode, multiplier_values, trapezoid_weights
from operators.kernels import DEFAULT_KERNEL_TOL, assemble_gram_chunked, kernel_matrix
from utils.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

# chunked rank-one assembly is used while j_max·N² stays below this many multiply-adds
CHUNKED_ASSEMBLY_LIMIT = 5e10

ASSEMBLY_STRATEGIES = ("auto", "chunked", "dilog")


def _check_grid(grid: Any, name: str = "grid") -> Grid:
    if not isinstance(grid, Grid):
        raise InvalidArgumentError(f"{name} must be a Grid (see make_grid), got {type(grid).__name__}")
    return grid


def _check_count(value: Any, name: str) -> int:
    if not isinstance(value, numbers.Integral) or isinstance(value, bool) or value < 1:
        raise InvalidArgumentError(f"{name} must be an integer >= 1, got {value!r}")
    return int(value)


def _column_scale(grid: Grid, mode: WeightingMode) -> np.ndarray:
    weights = trapezoid_weights(grid)
    return weights.weights if mode is WeightingMode.PAPER_FAITHFUL else weights.sqrt


def _moment_kernel(j: np.ndarray, t: np.ndarray) -> np.ndarray:
    # np.power(0.0, 0.0) == 1.0, the 0⁰ := 1 convention
    return np.power(t[None, :], (j - 1.0)[:, None])


def _composite_kernel(j: np.ndarray, t: np.ndarray) -> np.ndarray:
    return (1.0 - np.power(t[None, :], j[:, None])) / j[:, None]


def build_J(g_in: Grid, g_out: Grid, mode: Union[str, WeightingMode] = WeightingMode.PAPER_FAITHFUL) -> TriangularPrefixOperator:
    """
    Integration operator [Jx](s) = ∫_0^s x(t) dt on an M x N grid pair.

    Args:
        g_in: Input grid t_i (N points)
        g_out: Output grid s_j (M points)
        mode: Weighting mode

    Returns:
        TriangularPrefix operator with O(N + M) products
    """
    g_in, g_out = _check_grid(g_in, "g_in"), _check_grid(g_out, "g_out")
    mode = WeightingMode.parse(mode)
    if mode is WeightingMode.PAPER_FAITHFUL:
        row_scale = np.ones(g_out.n)
    else:
        row_scale = trapezoid_weights(g_out).sqrt
    meta = {"operator": "J", "N": g_in.n, "M": g_out.n, "weighting": mode.value}
    return TriangularPrefixOperator(g_out.points, g_in.points, row_scale, _column_scale(g_in, mode), meta)


def build_BH(num_moments: int, g: Grid, mode: Union[str, WeightingMode] = WeightingMode.PAPER_FAITHFUL,
             chunk_rows: int = DEFAULT_CHUNK_ROWS) -> KernelRowsOperator:
    """
    Hausdorff moment operator [B^H x]_j = ∫_0^1 t^(j-1) x(t) dt, j = 1..num_moments.

    The output is a sequence space, so no row weights are applied in
    either mode.
    """
    num_moments = _check_count(num_moments, "num_moments")
    g = _check_grid(g)
    mode = WeightingMode.parse(mode)
    meta = {"operator": "BH", "N": g.n, "M": num_moments, "weighting": mode.value}
    return KernelRowsOperator(num_moments, g.points, _moment_kernel, _column_scale(g, mode), chunk_rows, meta)


def build_BM(kappa: float, g: Grid) -> DiagonalOperator:
    """
    Multiplication operator x(s) -> s^kappa x(s) as the diagonal diag(m(t_i)).

    Pointwise multiplication carries no quadrature weights.
    """
    g = _check_grid(g)
    if not (np.isfinite(kappa) and kappa > 0):
        raise InvalidArgumentError(f"kappa must be > 0, got {kappa!r}")
    meta = {"operator": "BM", "N": g.n, "M": g.n, "kappa": float(kappa)}
    return DiagonalOperator(multiplier_values(g.points, kappa), meta)


def build_composite_A(num_moments: int, g: Grid, mode: Union[str, WeightingMode] = WeightingMode.PAPER_FAITHFUL,
                      chunk_rows: int = DEFAULT_CHUNK_ROWS) -> KernelRowsOperator:
    """
    Composition A = B^H∘J assembled with one quadrature:
    [Ax]_j = ∫_0^1 (1 - t^j)/j x(t) dt.
    """
    num_moments = _check_count(num_moments, "num_moments")
    g = _check_grid(g)
    mode = WeightingMode.parse(mode)
    meta = {"operator": "A", "N": g.n, "M": num_moments, "weighting": mode.value}
    return KernelRowsOperator(num_moments, g.points, _composite_kernel, _column_scale(g, mode), chunk_rows, meta)


def build_AstarA(g: Grid, j_max: int, mode: Union[str, WeightingMode] = WeightingMode.PAPER_FAITHFUL,
                 assembly: str = "auto", matrix_free: bool = False,
                 tol: float = DEFAULT_KERNEL_TOL, chunk_rows: int = DEFAULT_CHUNK_ROWS) -> GramKernelOperator:
    """
    Fredholm operator [A*A x](s) = ∫_0^1 k(s, t) x(t) dt with the kernel
    truncated after j_max terms.

    In paper weighting the operator is K·W, which is not symmetric; only
    symmetric_dense() (the core W^½·K·W^½ with the same eigenvalues) is.
    In l2 weighting the operator is that core.

    Args:
        g: Grid used for both s and t
        j_max: Kernel truncation index
        mode: Weighting mode
        assembly: 'chunked' (exact rank-one accumulation), 'dilog'
            (dilogarithm split) or 'auto'
        matrix_free: Keep no N x N kernel; products stream over j
        tol: Truncation tolerance of the dilogarithm split
        chunk_rows: Terms per rank-one block

    Returns:
        GramKernel operator
    """
    g = _check_grid(g)
    j_max = _check_count(j_max, "j_max")
    mode = WeightingMode.parse(mode)
    if assembly not in ASSEMBLY_STRATEGIES:
        raise InvalidArgumentError(f"Unknown assembly strategy {assembly!r}, expected one of {ASSEMBLY_STRATEGIES}")

    weights = trapezoid_weights(g).weights
    meta: Dict[str, Any] = {"operator": "AstarA", "N": g.n, "M": g.n, "weighting": mode.value, "j_max": j_max}
    paper = mode is WeightingMode.PAPER_FAITHFUL

    if matrix_free:
        logger.info(f"A*A matrix-free: N={g.n}, j_max={j_max}")
        meta["assembly"] = "streamed"
        return GramKernelOperator(weights, paper, kernel=None, t_points=g.points, j_max=j_max,
                                  chunk_rows=chunk_rows, metadata=meta)

    check_dense_size(g.n, g.n, "A*A kernel", "pass matrix_free=True to stream the kernel instead")
    if assembly == "auto":
        assembly = "chunked" if j_max * g.n * g.n <= CHUNKED_ASSEMBLY_LIMIT else "dilog"

    logger.info(f"Assembling A*A kernel: N={g.n}, j_max={j_max}, strategy={assembly}")
    if assembly == "chunked":
        kernel = assemble_gram_chunked(g.points, j_max, chunk_rows)
    else:
        kernel = kernel_matrix(g.points, g.points, j_max, tol)
        meta["kernel_tol"] = tol
    meta["assembly"] = assembly
    return GramKernelOperator(weights, paper, kernel=kernel, t_points=g.points, j_max=j_max,
                              chunk_rows=chunk_rows, metadata=meta)
