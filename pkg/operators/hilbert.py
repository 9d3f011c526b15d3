"""
Hilbert Matrix
Truncated Hilbert matrices H_n(i, j) = 1/(i + j - 1) and their Cholesky
factors L_n, in double precision and, for small orders, exact rationals.
"""

from dataclasses import dataclass
from typing import Optional
import logging
import math
import numbers

import mpmath
import numpy as np
import sympy
from scipy import linalg, special

from utils.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

# exact rational arithmetic is offered up to this order
RATIONAL_ORDER_LIMIT = 12


def _check_order(n) -> int:
    if not isinstance(n, numbers.Integral) or isinstance(n, bool) or n < 1:
        raise InvalidArgumentError(f"Hilbert order must be an integer >= 1, got {n!r}")
    return int(n)


def _exact_mode(n: int, exact: Optional[bool]) -> bool:
    if exact is None:
        return n <= RATIONAL_ORDER_LIMIT
    if exact and n > RATIONAL_ORDER_LIMIT:
        raise InvalidArgumentError(
            f"Exact rational mode is limited to n <= {RATIONAL_ORDER_LIMIT}, got n={n}"
        )
    return bool(exact)


@dataclass(frozen=True)
class HilbertTruncation:
    """n x n principal submatrix of the Hilbert matrix."""

    n: int
    matrix: np.ndarray
    exact: Optional[sympy.Matrix] = None


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular L_n with L_n·L_nᵀ = H_n."""

    n: int
    matrix: np.ndarray
    exact: Optional[sympy.Matrix] = None

    def reconstruct_exact(self) -> sympy.Matrix:
        """L·Lᵀ in exact arithmetic (requires the exact factor)."""
        if self.exact is None:
            raise InvalidArgumentError("Factor was built without exact entries")
        return self.exact * self.exact.T

    def verify_identity(self) -> bool:
        """True when L·Lᵀ equals H_n exactly."""
        difference = self.reconstruct_exact() - hilbert_matrix(self.n, exact=True).exact
        return bool(difference.applyfunc(sympy.simplify).is_zero_matrix)


def hilbert_matrix(n: int, exact: Optional[bool] = None) -> HilbertTruncation:
    """
    Build H_n.

    Args:
        n: Order, at least 1
        exact: Also build the rational matrix; defaults to n <= 12

    Returns:
        HilbertTruncation with a read-only float matrix
    """
    n = _check_order(n)
    matrix = linalg.hilbert(n)
    matrix.setflags(write=False)
    rational = None
    if _exact_mode(n, exact):
        rational = sympy.Matrix(n, n, lambda i, j: sympy.Rational(1, i + j + 1))
    return HilbertTruncation(n=n, matrix=matrix, exact=rational)


def _cholesky_rational(i: int, j: int) -> sympy.Rational:
    # ((i-1)!)² / ((i-j)! (i+j-1)!), 1-based
    return sympy.Rational(math.factorial(i - 1) ** 2, math.factorial(i - j) * math.factorial(i + j - 1))


def hilbert_cholesky(n: int, exact: Optional[bool] = None) -> CholeskyFactor:
    """
    Cholesky factor of H_n from the closed form
    L(i, j) = √(2j-1)·((i-1)!)² / ((i-j)!·(i+j-1)!),  j <= i.

    Float entries are evaluated in the log domain, so large orders do not
    overflow the factorials.
    """
    n = _check_order(n)
    i = np.arange(1, n + 1, dtype=np.float64)[:, None]
    j = np.arange(1, n + 1, dtype=np.float64)[None, :]
    lower = j <= i
    with np.errstate(invalid="ignore"):
        log_entries = (0.5 * np.log(2.0 * j - 1.0) + 2.0 * special.gammaln(i)
                       - special.gammaln(np.where(lower, i - j + 1.0, 1.0)) - special.gammaln(i + j))
    matrix = np.where(lower, np.exp(log_entries), 0.0)
    matrix.setflags(write=False)

    rational = None
    if _exact_mode(n, exact):
        rational = sympy.Matrix(n, n, lambda a, b: sympy.sqrt(2 * b + 1) * _cholesky_rational(a + 1, b + 1)
                                if b <= a else sympy.Integer(0))
        # correctly rounded entries from the exact values
        matrix = np.array([[math.sqrt(2 * b + 1) * float(_cholesky_rational(a + 1, b + 1)) if b <= a else 0.0
                            for b in range(n)] for a in range(n)])
        matrix.setflags(write=False)
    return CholeskyFactor(n=n, matrix=matrix, exact=rational)


def hilbert_reference_eigenvalues(n: int, dps: int = 50) -> np.ndarray:
    """
    Eigenvalues of H_n (= its singular values) in descending order,
    computed with mpmath at dps decimal digits and rounded to double.
    """
    n = _check_order(n)
    with mpmath.workdps(dps):
        H = mpmath.matrix(n, n)
        for a in range(n):
            for b in range(n):
                H[a, b] = mpmath.mpf(1) / (a + b + 1)
        eigenvalues = mpmath.eigsy(H, eigvals_only=True)
        values = sorted((float(eigenvalues[a]) for a in range(n)), reverse=True)
    return np.array(values)


def hilbert_rayleigh_quotient(n: int, chunk_rows: int = 1024) -> float:
    """
    Rayleigh quotient ⟨H x, x⟩ / ‖x‖² for x_r = 1/√r, r = 1..n.

    A lower bound for σ_1(H_n) that creeps up towards π = ‖H‖ as n grows.
    """
    n = _check_order(n)
    r = np.arange(1, n + 1, dtype=np.float64)
    x = 1.0 / np.sqrt(r)
    total = 0.0
    for start in range(0, n, chunk_rows):
        rows = r[start:start + chunk_rows]
        block = 1.0 / (rows[:, None] + r[None, :] - 1.0)
        total += float(x[start:start + chunk_rows] @ (block @ x))
    return total / float(np.sum(1.0 / r))
