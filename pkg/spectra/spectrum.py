"""
Spectrum Type
Descending singular values with the provenance of how they were computed.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple
import logging

import numpy as np

from utils.errors import InvalidArgumentError, RangeError

logger = logging.getLogger(__name__)

EPS = float(np.finfo(np.float64).eps)


class SpectrumMethod(str, Enum):
    DENSE_SVD = "DenseSVD"
    SYMMETRIC_EIG = "SymmetricEig"
    LANCZOS_PARTIAL = "LanczosPartial"
    DIAGONAL_EXACT = "DiagonalExact"


def default_rank_tolerance(rows: int, cols: int) -> float:
    """Relative rank threshold max(rows, cols)·eps."""
    return max(int(rows), int(cols)) * EPS


def _count_above(values: np.ndarray, rel_tol: float) -> int:
    if values.size == 0 or values[0] == 0.0:
        return 0
    return int(np.count_nonzero(values > rel_tol * values[0]))


@dataclass(frozen=True)
class Spectrum:
    """
    Singular values σ_1 >= σ_2 >= ... >= 0 of an operator.

    tolerance is the relative threshold behind numerical_rank; engine
    settings (iteration counts, residual tolerances, seeds) live in metadata.
    """

    values: np.ndarray
    method: SpectrumMethod
    rows: int
    cols: int
    requested_k: int
    tolerance: float
    numerical_rank: int
    metadata: Dict[str, Any] = field(default_factory=dict)
    converged: Optional[Tuple[bool, ...]] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True).ravel()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "method", SpectrumMethod(self.method))

        expected = min(int(self.requested_k), min(int(self.rows), int(self.cols)))
        if values.size != expected:
            raise InvalidArgumentError(
                f"Spectrum length {values.size} does not match min(requested_k, rows, cols) = {expected}"
            )
        if values.size and np.any(values < 0):
            raise InvalidArgumentError("Singular values must be non-negative")
        if values.size > 1 and np.any(np.diff(values) > 0):
            raise InvalidArgumentError("Singular values must be sorted in descending order")
        if self.numerical_rank > values.size:
            raise InvalidArgumentError("numerical_rank exceeds the number of values")
        if self.converged is not None and len(self.converged) != values.size:
            raise InvalidArgumentError("converged flags must align with values")

    @classmethod
    def build(cls, values: Sequence[float], method: SpectrumMethod, rows: int, cols: int,
              requested_k: Optional[int] = None, metadata: Optional[Dict[str, Any]] = None,
              converged: Optional[Sequence[bool]] = None, rel_tol: Optional[float] = None) -> "Spectrum":
        """Create a spectrum and compute its numerical rank."""
        values = np.asarray(values, dtype=np.float64).ravel()
        if requested_k is None:
            requested_k = min(rows, cols)
        tolerance = default_rank_tolerance(rows, cols) if rel_tol is None else float(rel_tol)
        return cls(
            values=values,
            method=method,
            rows=int(rows),
            cols=int(cols),
            requested_k=int(requested_k),
            tolerance=tolerance,
            numerical_rank=_count_above(values, tolerance),
            metadata=dict(metadata or {}),
            converged=None if converged is None else tuple(bool(c) for c in converged),
        )

    def __len__(self) -> int:
        return int(self.values.size)

    def sigma(self, index: int) -> float:
        """σ_index with 1-based indexing."""
        if not 1 <= index <= len(self):
            raise RangeError(f"Index {index} outside spectrum of length {len(self)}", index=index)
        return float(self.values[index - 1])

    def prefix(self, k: int) -> "Spectrum":
        """The first k values as a spectrum with the same provenance."""
        k = min(int(k), len(self))
        return Spectrum.build(self.values[:k], self.method, self.rows, self.cols, requested_k=k,
                              metadata=self.metadata,
                              converged=None if self.converged is None else self.converged[:k],
                              rel_tol=self.tolerance)

    def to_dict(self, include_values: bool = True) -> Dict[str, Any]:
        data = {
            "method": self.method.value,
            "rows": self.rows,
            "cols": self.cols,
            "requested_k": self.requested_k,
            "length": len(self),
            "tolerance": self.tolerance,
            "numerical_rank": self.numerical_rank,
            "metadata": self.metadata,
        }
        if self.converged is not None:
            data["unconverged"] = int(sum(not c for c in self.converged))
        if include_values:
            data["values"] = [float(v) for v in self.values]
        return data


def numerical_rank(spectrum: Spectrum, rel_tol: Optional[float] = None) -> int:
    """
    Count of σ_i > rel_tol·σ_1.

    Args:
        spectrum: Non-empty spectrum
        rel_tol: Relative threshold, default max(rows, cols)·eps

    Returns:
        Numerical rank (0 for an all-zero spectrum)
    """
    if len(spectrum) == 0:
        raise InvalidArgumentError("numerical_rank needs a non-empty spectrum")
    if rel_tol is None:
        rel_tol = default_rank_tolerance(spectrum.rows, spectrum.cols)
    if rel_tol < 0:
        raise InvalidArgumentError(f"rel_tol must be >= 0, got {rel_tol}")
    return _count_above(spectrum.values, rel_tol)
