"""
Discrete Operators
Real linear maps with apply and adjoint-apply, stored densely or in a
structured, matrix-free form. All representations are scipy
LinearOperators, so they plug into any scipy solver as well as into the
spectra engines of this lab.
"""

from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence
import logging

import numpy as np
from scipy.sparse.linalg import LinearOperator

from utils.errors import InvalidArgumentError, OperatorSizeError

logger = logging.getLogger(__name__)

# Dense assembly is refused beyond this many entries (128 MB of float64).
DENSE_ENTRY_LIMIT = 16_000_000

# Rows per block for kernel-row operators; fixed so summation order is reproducible.
DEFAULT_CHUNK_ROWS = 256


class Representation(str, Enum):
    DENSE = "DenseMatrix"
    TRIANGULAR_PREFIX = "TriangularPrefix"
    MOMENT_ROWS = "MomentRows"
    DIAGONAL = "Diagonal"
    PRODUCT = "Product"
    GRAM_KERNEL = "GramKernel"


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=np.float64, copy=True, order="C")
    values.setflags(write=False)
    return values


def check_dense_size(rows: int, cols: int, what: str, suggestion: str) -> None:
    """Raise OperatorSizeError if a rows x cols dense array is over the limit."""
    entries = int(rows) * int(cols)
    if entries > DENSE_ENTRY_LIMIT:
        raise OperatorSizeError(f"Dense {what} of shape {rows}x{cols} refused", entries, DENSE_ENTRY_LIMIT, suggestion)


class DiscreteOperator(LinearOperator):
    """
    Base class for the lab's discrete operators.

    Subclasses implement _matvec/_rmatvec (and usually _matmat/_to_dense);
    the public surface is apply, adjoint_apply and to_dense.
    """

    representation: Representation

    def __init__(self, rows: int, cols: int, metadata: Optional[Dict[str, Any]] = None):
        if rows < 1 or cols < 1:
            raise InvalidArgumentError(f"Operator dimensions must be positive, got {rows}x{cols}")
        super().__init__(dtype=np.dtype(np.float64), shape=(int(rows), int(cols)))
        self._metadata = dict(metadata or {})

    @property
    def rows(self) -> int:
        return self.shape[0]

    @property
    def cols(self) -> int:
        return self.shape[1]

    @property
    def name(self) -> str:
        return str(self._metadata.get("operator", type(self).__name__))

    @property
    def metadata(self) -> Dict[str, Any]:
        """Provenance fields copied into every Spectrum computed from this operator."""
        info = dict(self._metadata)
        info.setdefault("operator", self.name)
        info["representation"] = self.representation.value
        info["rows"] = self.rows
        info["cols"] = self.cols
        return info

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Compute Op·x for a vector of length cols."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.cols,):
            raise InvalidArgumentError(f"{self.name}: expected input of shape ({self.cols},), got {x.shape}")
        return self._matvec(x)

    def adjoint_apply(self, y: np.ndarray) -> np.ndarray:
        """Compute Op*·y for a vector of length rows."""
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.rows,):
            raise InvalidArgumentError(f"{self.name}: expected input of shape ({self.rows},), got {y.shape}")
        return self._rmatvec(y)

    def to_dense(self) -> np.ndarray:
        """Assemble the full matrix, refusing sizes above DENSE_ENTRY_LIMIT."""
        check_dense_size(self.rows, self.cols, f"assembly of {self.name}",
                         "use the matrix-free representation with lanczos_topk instead")
        return self._to_dense()

    def symmetric_dense(self) -> np.ndarray:
        """Dense symmetric matrix whose eigenvalues are this operator's (see GramKernelOperator)."""
        return self.to_dense()

    def _to_dense(self) -> np.ndarray:
        return self._matmat(np.eye(self.cols))

    def _matmat(self, X: np.ndarray) -> np.ndarray:
        return np.column_stack([self._matvec(X[:, k]) for k in range(X.shape[1])])

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name} {self.rows}x{self.cols}>"


class DenseOperator(DiscreteOperator):
    """Explicit matrix."""

    representation = Representation.DENSE

    def __init__(self, matrix: np.ndarray, metadata: Optional[Dict[str, Any]] = None):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise InvalidArgumentError(f"Dense operator needs a 2-D array, got ndim={matrix.ndim}")
        check_dense_size(matrix.shape[0], matrix.shape[1], "operator", "build a structured operator instead")
        super().__init__(matrix.shape[0], matrix.shape[1], metadata)
        self.matrix = _frozen(matrix)

    def _matvec(self, x):
        return self.matrix @ x.ravel()

    def _rmatvec(self, y):
        return self.matrix.T @ y.ravel()

    def _matmat(self, X):
        return self.matrix @ X

    def _to_dense(self):
        return np.array(self.matrix)


class TriangularPrefixOperator(DiscreteOperator):
    """
    Entries row_scale[j]·[t_i <= s_j]·col_scale[i].

    Both products reduce to a prefix (or suffix) sum, so apply and
    adjoint-apply cost O(M + N) after the index tables are built.
    """

    representation = Representation.TRIANGULAR_PREFIX

    def __init__(self, s_points: np.ndarray, t_points: np.ndarray,
                 row_scale: np.ndarray, col_scale: np.ndarray,
                 metadata: Optional[Dict[str, Any]] = None):
        s_points = np.asarray(s_points, dtype=np.float64)
        t_points = np.asarray(t_points, dtype=np.float64)
        if np.any(np.diff(s_points) <= 0) or np.any(np.diff(t_points) <= 0):
            raise InvalidArgumentError("TriangularPrefix needs strictly increasing grids")
        super().__init__(len(s_points), len(t_points), metadata)
        self.s_points = _frozen(s_points)
        self.t_points = _frozen(t_points)
        self.row_scale = _frozen(row_scale)
        self.col_scale = _frozen(col_scale)
        # number of t_i <= s_j, and first j with s_j >= t_i
        self._counts = np.searchsorted(self.t_points, self.s_points, side="right")
        self._first = np.searchsorted(self.s_points, self.t_points, side="left")
        self._counts.setflags(write=False)
        self._first.setflags(write=False)

    def _matvec(self, x):
        prefix = np.concatenate(([0.0], np.cumsum(self.col_scale * x.ravel())))
        return self.row_scale * prefix[self._counts]

    def _rmatvec(self, y):
        weighted = self.row_scale * y.ravel()
        suffix = np.concatenate((np.cumsum(weighted[::-1])[::-1], [0.0]))
        return self.col_scale * suffix[self._first]

    def _matmat(self, X):
        prefix = np.vstack((np.zeros((1, X.shape[1])), np.cumsum(self.col_scale[:, None] * X, axis=0)))
        return self.row_scale[:, None] * prefix[self._counts]

    def _to_dense(self):
        mask = self.t_points[None, :] <= self.s_points[:, None]
        return self.row_scale[:, None] * mask * self.col_scale[None, :]


class KernelRowsOperator(DiscreteOperator):
    """
    Operator whose row j (j = 1..M) is a closed-form kernel k(j, t) sampled
    on the input grid and scaled by column weights.

    Rows are generated block by block on every product, so memory stays
    O(chunk·N) regardless of M.
    """

    representation = Representation.MOMENT_ROWS

    def __init__(self, num_rows: int, t_points: np.ndarray,
                 row_kernel: Callable[[np.ndarray, np.ndarray], np.ndarray],
                 col_scale: np.ndarray, chunk_rows: int = DEFAULT_CHUNK_ROWS,
                 metadata: Optional[Dict[str, Any]] = None):
        super().__init__(num_rows, len(t_points), metadata)
        if chunk_rows < 1:
            raise InvalidArgumentError(f"chunk_rows must be >= 1, got {chunk_rows}")
        self.t_points = _frozen(t_points)
        self.col_scale = _frozen(col_scale)
        self.row_kernel = row_kernel
        self.chunk_rows = int(chunk_rows)

    def row_block(self, start: int, stop: int) -> np.ndarray:
        """Rows start+1 .. stop (1-based moment indices) as a dense block."""
        j = np.arange(start + 1, stop + 1, dtype=np.float64)
        return self.row_kernel(j, self.t_points) * self.col_scale[None, :]

    def _blocks(self):
        for start in range(0, self.rows, self.chunk_rows):
            stop = min(start + self.chunk_rows, self.rows)
            yield start, stop, self.row_block(start, stop)

    def _matvec(self, x):
        x = x.ravel()
        out = np.empty(self.rows)
        for start, stop, block in self._blocks():
            out[start:stop] = block @ x
        return out

    def _rmatvec(self, y):
        y = y.ravel()
        out = np.zeros(self.cols)
        for start, stop, block in self._blocks():
            out += block.T @ y[start:stop]
        return out

    def _matmat(self, X):
        out = np.empty((self.rows, X.shape[1]))
        for start, stop, block in self._blocks():
            out[start:stop] = block @ X
        return out

    def _to_dense(self):
        return np.vstack([block for _, _, block in self._blocks()])


class DiagonalOperator(DiscreteOperator):
    """Square diagonal matrix."""

    representation = Representation.DIAGONAL

    def __init__(self, diagonal: np.ndarray, metadata: Optional[Dict[str, Any]] = None):
        diagonal = np.asarray(diagonal, dtype=np.float64).ravel()
        super().__init__(len(diagonal), len(diagonal), metadata)
        self.diagonal = _frozen(diagonal)

    def _matvec(self, x):
        return self.diagonal * x.ravel()

    def _rmatvec(self, y):
        return self.diagonal * y.ravel()

    def _matmat(self, X):
        return self.diagonal[:, None] * X

    def _to_dense(self):
        return np.diag(self.diagonal)


class ProductOperator(DiscreteOperator):
    """Ordered product factors[0] · factors[1] · ... · factors[-1]."""

    representation = Representation.PRODUCT

    def __init__(self, factors: Sequence[DiscreteOperator], metadata: Optional[Dict[str, Any]] = None):
        factors = list(factors)
        if not factors:
            raise InvalidArgumentError("Product needs at least one factor")
        for left, right in zip(factors, factors[1:]):
            if left.cols != right.rows:
                raise InvalidArgumentError(
                    f"Factors not conformable: {left.name} is {left.rows}x{left.cols}, "
                    f"{right.name} is {right.rows}x{right.cols}"
                )
        meta = {"operator": "*".join(f.name for f in factors), "factors": [f.name for f in factors]}
        meta.update(metadata or {})
        super().__init__(factors[0].rows, factors[-1].cols, meta)
        self.factors: List[DiscreteOperator] = factors

    def _matvec(self, x):
        x = x.ravel()
        for factor in reversed(self.factors):
            x = factor._matvec(x)
        return x

    def _rmatvec(self, y):
        y = y.ravel()
        for factor in self.factors:
            y = factor._rmatvec(y)
        return y

    def _matmat(self, X):
        for factor in reversed(self.factors):
            X = factor._matmat(X)
        return X

    def _to_dense(self):
        dense = self.factors[-1].to_dense()
        for factor in reversed(self.factors[:-1]):
            dense = factor._matmat(dense)
        return dense


class GramKernelOperator(DiscreteOperator):
    """
    Discretized Fredholm operator with a symmetric kernel matrix K.

    PaperFaithful applies K·W (trapezoid weights on columns);
    L2Consistent applies W^½·K·W^½. Both have the eigenvalues of the
    symmetric core W^½·K·W^½, which symmetric_dense returns.

    Without a stored kernel the operator streams K·u = Σ_j g_j (g_j·u) with
    g_j = (1 - t^j)/j over blocks of j, keeping no N x N array.
    """

    representation = Representation.GRAM_KERNEL

    def __init__(self, weights: np.ndarray, paper_faithful: bool,
                 kernel: Optional[np.ndarray] = None,
                 t_points: Optional[np.ndarray] = None, j_max: Optional[int] = None,
                 chunk_rows: int = DEFAULT_CHUNK_ROWS,
                 metadata: Optional[Dict[str, Any]] = None):
        weights = np.asarray(weights, dtype=np.float64)
        n = len(weights)
        super().__init__(n, n, metadata)
        if kernel is None and (t_points is None or j_max is None):
            raise InvalidArgumentError("Matrix-free GramKernel needs t_points and j_max")
        self.weights = _frozen(weights)
        self.sqrt_weights = _frozen(np.sqrt(weights))
        self.paper_faithful = bool(paper_faithful)
        self.kernel = None if kernel is None else _frozen(kernel)
        self.t_points = None if t_points is None else _frozen(t_points)
        self.j_max = j_max
        self.chunk_rows = int(chunk_rows)

    @property
    def matrix_free(self) -> bool:
        return self.kernel is None

    def _kernel_apply(self, U: np.ndarray) -> np.ndarray:
        if self.kernel is not None:
            return self.kernel @ U
        from operators.kernels import gram_factor_rows

        out = np.zeros_like(U, dtype=np.float64)
        for start in range(0, self.j_max, self.chunk_rows):
            stop = min(start + self.chunk_rows, self.j_max)
            block = gram_factor_rows(self.t_points, start, stop)
            out += block.T @ (block @ U)
        return out

    def _matvec(self, x):
        x = x.ravel()
        if self.paper_faithful:
            return self._kernel_apply(self.weights * x)
        return self.sqrt_weights * self._kernel_apply(self.sqrt_weights * x)

    def _rmatvec(self, y):
        y = y.ravel()
        if self.paper_faithful:
            return self.weights * self._kernel_apply(y)
        return self.sqrt_weights * self._kernel_apply(self.sqrt_weights * y)

    def _matmat(self, X):
        if self.paper_faithful:
            return self._kernel_apply(self.weights[:, None] * X)
        return self.sqrt_weights[:, None] * self._kernel_apply(self.sqrt_weights[:, None] * X)

    def _kernel_dense(self) -> np.ndarray:
        if self.kernel is not None:
            return np.array(self.kernel)
        from operators.kernels import assemble_gram_chunked

        return assemble_gram_chunked(self.t_points, self.j_max, self.chunk_rows)

    def _to_dense(self):
        if self.paper_faithful:
            return self._kernel_dense() * self.weights[None, :]
        return self.symmetric_dense()

    def symmetric_dense(self) -> np.ndarray:
        check_dense_size(self.rows, self.cols, f"kernel core of {self.name}",
                         "use lanczos_topk on the matrix-free operator instead")
        core = self.sqrt_weights[:, None] * self._kernel_dense() * self.sqrt_weights[None, :]
        return 0.5 * (core + core.T)


def as_operator(matrix: Any, name: str = "matrix") -> DiscreteOperator:
    """Wrap an array (or pass through an operator) as a DiscreteOperator."""
    if isinstance(matrix, DiscreteOperator):
        return matrix
    return DenseOperator(np.asarray(matrix, dtype=np.float64), metadata={"operator": name})
