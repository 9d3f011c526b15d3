"""
Kernel Evaluation
Partial dilogarithm sums and the Fredholm kernel of A*A,
k(s, t) = Σ_{j<=J} (1 - s^j)(1 - t^j) / j².

The kernel is evaluated through the split
k(s, t) = S(1) - S(s) - S(t) + S(st),   S(x) = Σ_{j<=J} x^j / j²,
or assembled exactly as a sum of rank-one terms g_j g_jᵀ.
"""

from functools import lru_cache
from typing import Optional
import logging
import math
import numbers

import numpy as np
from scipy import special

from utils.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

DEFAULT_KERNEL_TOL = 1e-13

# terms summed between two tail-bound checks
_SERIES_BLOCK = 32


def _check_j_max(j_max) -> None:
    if not isinstance(j_max, numbers.Integral) or isinstance(j_max, bool) or j_max < 1:
        raise InvalidArgumentError(f"j_max must be an integer >= 1, got {j_max!r}")


def _check_tol(tol: float) -> None:
    if not (tol > 0):
        raise InvalidArgumentError(f"Tolerance must be > 0, got {tol!r}")


@lru_cache(maxsize=64)
def basel_partial(j_max: int) -> float:
    """Σ_{j<=j_max} 1/j², summed from the smallest term up."""
    _check_j_max(j_max)
    j = np.arange(j_max, 0, -1, dtype=np.float64)
    return float(np.sum(1.0 / (j * j)))


def partial_dilog_array(x: np.ndarray, j_max: int, tol: float = DEFAULT_KERNEL_TOL) -> np.ndarray:
    """
    Vectorized S_{j_max}(x) = Σ_{j<=j_max} x^j / j² for x in [0, 1].

    Entries with x < 1 stop as soon as the geometric tail bound
    x^(J+1) / ((J+1)² (1 - x)) drops below tol; x = 1 uses the exact
    partial Basel sum. Every entry follows the same summation sequence
    whatever the other entries are, so equal inputs give equal outputs.
    """
    _check_j_max(j_max)
    _check_tol(tol)
    x = np.asarray(x, dtype=np.float64)
    flat = x.ravel()
    inside = (flat >= 0.0) & (flat <= 1.0)
    if not np.all(inside):
        bad = flat[~inside][0]
        raise InvalidArgumentError(f"Partial dilogarithm needs x in [0, 1], got {bad!r}")

    out = np.zeros_like(flat)
    out[flat == 1.0] = basel_partial(int(j_max))

    active = np.flatnonzero((flat > 0.0) & (flat < 1.0))
    base = flat[active]
    power = base.copy()
    acc = np.zeros_like(base)
    j = 1
    while active.size and j <= j_max:
        stop = min(j + _SERIES_BLOCK, j_max + 1)
        for k in range(j, stop):
            acc += power / float(k * k)
            power *= base
        j = stop
        if j > j_max:
            break
        tail = power / (float(j * j) * (1.0 - base))
        done = tail < tol
        if np.any(done):
            out[active[done]] = acc[done]
            keep = ~done
            active, base, power, acc = active[keep], base[keep], power[keep], acc[keep]
    out[active] = acc
    return out.reshape(x.shape)


def partial_dilog(x: float, j_max: Optional[int], tol: float = DEFAULT_KERNEL_TOL) -> float:
    """
    Partial dilogarithm S_{j_max}(x) with absolute error <= tol.

    Args:
        x: Argument in [0, 1]
        j_max: Number of terms; None sums the full series Li2(x)
        tol: Absolute tolerance for early termination

    Returns:
        The (truncated) series value
    """
    if not (0.0 <= x <= 1.0):
        raise InvalidArgumentError(f"Partial dilogarithm needs x in [0, 1], got {x!r}")
    if j_max is None:
        _check_tol(tol)
        if x == 1.0:
            return float(special.zeta(2.0, 1.0))
        # Li2(x) = spence(1 - x)
        return float(special.spence(1.0 - x))
    return float(partial_dilog_array(np.array([x], dtype=np.float64), j_max, tol)[0])


def kernel_k(s: float, t: float, j_max: Optional[int], tol: float = DEFAULT_KERNEL_TOL) -> float:
    """
    Kernel of A*A at (s, t), truncated after j_max terms.

    Computed as (S(1) + S(st)) - (S(s) + S(t)) with the same truncation in
    all four sums.
    """
    for name, value in (("s", s), ("t", t)):
        if not (0.0 <= value <= 1.0):
            raise InvalidArgumentError(f"Kernel argument {name} must lie in [0, 1], got {value!r}")
    values = [partial_dilog(x, j_max, tol) for x in (1.0, s * t, s, t)]
    return max((values[0] + values[1]) - (values[2] + values[3]), 0.0)


def kernel_matrix(s_points: np.ndarray, t_points: np.ndarray, j_max: int,
                  tol: float = DEFAULT_KERNEL_TOL) -> np.ndarray:
    """
    Kernel samples K[a, b] = k(s_a, t_b) via the dilogarithm split.

    When both point sets are equal the result is exactly symmetric, and the
    row at s = 1 is exactly zero.
    """
    s_points = np.asarray(s_points, dtype=np.float64)
    t_points = np.asarray(t_points, dtype=np.float64)
    logger.debug(f"Kernel split assembly {len(s_points)}x{len(t_points)}, j_max={j_max}, tol={tol:g}")

    s_sums = partial_dilog_array(s_points, j_max, tol)
    if s_points.shape == t_points.shape and np.array_equal(s_points, t_points):
        t_sums = s_sums
    else:
        t_sums = partial_dilog_array(t_points, j_max, tol)
    cross = partial_dilog_array(np.multiply.outer(s_points, t_points), j_max, tol)

    kernel = (basel_partial(int(j_max)) + cross) - (s_sums[:, None] + t_sums[None, :])
    return np.maximum(kernel, 0.0)


def gram_factor_rows(t_points: np.ndarray, start: int, stop: int) -> np.ndarray:
    """Rows g_j(t) = (1 - t^j)/j for j = start+1 .. stop."""
    j = np.arange(start + 1, stop + 1, dtype=np.float64)
    return (1.0 - np.power(t_points[None, :], j[:, None])) / j[:, None]


def assemble_gram_chunked(t_points: np.ndarray, j_max: int, chunk_rows: int) -> np.ndarray:
    """
    K = Σ_{j<=j_max} g_j g_jᵀ, accumulated block by block in fixed order.
    """
    _check_j_max(j_max)
    t_points = np.asarray(t_points, dtype=np.float64)
    n = len(t_points)
    kernel = np.zeros((n, n))
    blocks = math.ceil(j_max / chunk_rows)
    logger.debug(f"Chunked Gram assembly N={n}, j_max={j_max}, {blocks} blocks of {chunk_rows}")
    for start in range(0, j_max, chunk_rows):
        block = gram_factor_rows(t_points, start, min(start + chunk_rows, j_max))
        kernel += block.T @ block
    return 0.5 * (kernel + kernel.T)
