"""
Dense Spectrum Engines
Full SVD, symmetric eigenvalues, exact diagonal spectra and the dispatcher
that chooses between dense and iterative computation.
"""

from typing import Any, Optional
import logging

import numpy as np
from scipy import linalg

from operators.discrete import DENSE_ENTRY_LIMIT, DiagonalOperator, as_operator
from spectra.lanczos import LanczosConfig, lanczos_topk
from spectra.spectrum import Spectrum, SpectrumMethod
from utils.errors import InvalidArgumentError, OperatorSizeError

logger = logging.getLogger(__name__)

ENGINES = ("auto", "dense", "lanczos")


def _requested(k: Optional[int], rows: int, cols: int) -> int:
    full = min(rows, cols)
    if k is None:
        return full
    if k < 1:
        raise InvalidArgumentError(f"k must be >= 1, got {k}")
    return min(int(k), full)


def full_svd(op: Any, k: Optional[int] = None) -> Spectrum:
    """
    All singular values from a dense SVD, optionally truncated to the first k.

    Args:
        op: DiscreteOperator or 2-D array within the dense threshold
        k: Number of leading values to report

    Returns:
        Spectrum with method DenseSVD
    """
    op = as_operator(op)
    try:
        dense = op.to_dense()
    except OperatorSizeError as exc:
        raise OperatorSizeError(f"full_svd cannot densify {op.name}", exc.entries, exc.limit,
                                "use lanczos_topk for the leading singular values") from exc
    values = linalg.svdvals(dense)
    requested = _requested(k, op.rows, op.cols)
    logger.debug(f"full_svd {op.name}: {op.rows}x{op.cols}, reporting {requested}")
    return Spectrum.build(values[:requested], SpectrumMethod.DENSE_SVD, op.rows, op.cols,
                          requested_k=requested, metadata=op.metadata)


def sym_eigs(op: Any, k: Optional[int] = None, symmetry_tol: float = 1e-12) -> Spectrum:
    """
    Eigenvalues of a symmetric positive semidefinite operator as a spectrum.

    Negative eigenvalues produced by roundoff are clamped to zero; their
    count is kept in metadata['clamped'].
    """
    op = as_operator(op)
    if op.rows != op.cols:
        raise InvalidArgumentError(f"sym_eigs needs a square operator, got {op.rows}x{op.cols}")
    dense = op.symmetric_dense()
    asymmetry = np.abs(dense - dense.T)
    scale = np.maximum(np.abs(dense), np.abs(dense.T))
    violations = asymmetry > symmetry_tol * scale
    if np.any(violations):
        worst = float(np.max(asymmetry[violations] / np.maximum(scale[violations], np.finfo(float).tiny)))
        raise InvalidArgumentError(f"sym_eigs: {op.name} is not symmetric (max relative asymmetry {worst:.3e})")

    eigenvalues = linalg.eigvalsh(dense)[::-1]
    clamped = int(np.count_nonzero(eigenvalues < 0))
    eigenvalues = np.maximum(eigenvalues, 0.0)
    # clamping can only break order among the zeros it created
    eigenvalues = np.sort(eigenvalues)[::-1]
    requested = _requested(k, op.rows, op.cols)
    metadata = op.metadata
    metadata["clamped"] = clamped
    if clamped:
        logger.debug(f"sym_eigs {op.name}: clamped {clamped} negative eigenvalues to zero")
    return Spectrum.build(eigenvalues[:requested], SpectrumMethod.SYMMETRIC_EIG, op.rows, op.cols,
                          requested_k=requested, metadata=metadata)


def diagonal_spectrum(op: DiagonalOperator, k: Optional[int] = None) -> Spectrum:
    """Exact singular values of a diagonal operator: the decreasing rearrangement of |diag|."""
    if not isinstance(op, DiagonalOperator):
        raise InvalidArgumentError(f"diagonal_spectrum needs a DiagonalOperator, got {type(op).__name__}")
    values = np.sort(np.abs(op.diagonal))[::-1]
    requested = _requested(k, op.rows, op.cols)
    return Spectrum.build(values[:requested], SpectrumMethod.DIAGONAL_EXACT, op.rows, op.cols,
                          requested_k=requested, metadata=op.metadata)


def compute_spectrum(op: Any, engine: str = "auto", k: Optional[int] = None,
                     lanczos: Optional[LanczosConfig] = None) -> Spectrum:
    """
    Leading singular values with the requested engine.

    'auto' uses the exact rearrangement for diagonal operators, a dense SVD
    within the dense threshold, and Lanczos bidiagonalization otherwise.
    """
    if engine not in ENGINES:
        raise InvalidArgumentError(f"Unknown spectrum engine {engine!r}, expected one of {ENGINES}")
    op = as_operator(op)
    if engine == "auto":
        if isinstance(op, DiagonalOperator):
            return diagonal_spectrum(op, k)
        engine = "dense" if op.rows * op.cols <= DENSE_ENTRY_LIMIT else "lanczos"
        logger.debug(f"Engine for {op.name} ({op.rows}x{op.cols}): {engine}")

    if engine == "dense":
        return full_svd(op, k)

    requested = _requested(k, op.rows, op.cols)
    config = lanczos or LanczosConfig(k=requested)
    if config.k != requested:
        config = config.with_k(requested)
    return lanczos_topk(op, config)
