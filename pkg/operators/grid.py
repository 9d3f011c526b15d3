"""
Grids and Quadrature Weights
Uniform partitions of [0, 1] and the trapezoidal weights every
discretization in the lab is built on.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Union
import logging
import numbers

import numpy as np

from utils.errors import InvalidArgumentError

logger = logging.getLogger(__name__)


class WeightingMode(str, Enum):
    """How quadrature weights enter a discrete operator."""

    # full trapezoid weights on columns, none on rows
    PAPER_FAITHFUL = "paper"
    # square-root weights on both sides, so ℓ² norms approximate L² norms
    L2_CONSISTENT = "l2"

    @classmethod
    def parse(cls, value: Union[str, "WeightingMode"]) -> "WeightingMode":
        """Accept an enum member, its value or its name."""
        if isinstance(value, cls):
            return value
        text = str(value).strip()
        for member in cls:
            if text.lower() in (member.value, member.name.lower()):
                return member
        raise InvalidArgumentError(f"Unknown weighting mode: {value!r} (expected 'paper' or 'l2')")


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.ascontiguousarray(values, dtype=np.float64)
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class Grid:
    """Uniform grid t_i = (i-1)/(n-1), i = 1..n."""

    n: int
    points: np.ndarray

    @property
    def spacing(self) -> float:
        return 1.0 / (self.n - 1)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class QuadratureWeights:
    """Trapezoid weights aligned 1:1 with a grid."""

    weights: np.ndarray

    def integrate(self, samples: np.ndarray) -> float:
        """Apply the rule to function samples on the matching grid."""
        samples = np.asarray(samples, dtype=np.float64)
        if samples.shape != self.weights.shape:
            raise InvalidArgumentError(
                f"Sample count {samples.shape} does not match weight count {self.weights.shape}"
            )
        return float(np.dot(self.weights, samples))

    @property
    def sqrt(self) -> np.ndarray:
        return np.sqrt(self.weights)


def make_grid(n: int) -> Grid:
    """
    Build the uniform grid on [0, 1].

    Args:
        n: Number of points, at least 2

    Returns:
        Grid with endpoints exactly 0 and 1
    """
    if not isinstance(n, numbers.Integral) or isinstance(n, bool) or n < 2:
        raise InvalidArgumentError(f"Grid needs an integer n >= 2, got {n!r}")
    n = int(n)
    points = np.arange(n, dtype=np.float64) / (n - 1)
    return Grid(n=n, points=_frozen(points))


def trapezoid_weights(grid: Grid) -> QuadratureWeights:
    """
    Trapezoidal rule weights for a uniform grid.

    Interior weights are 1/(n-1), the two endpoint weights half of that,
    so the weights sum to one and integrate affine functions exactly.
    """
    h = grid.spacing
    weights = np.full(grid.n, h)
    weights[0] = weights[-1] = 0.5 * h
    return QuadratureWeights(weights=_frozen(weights))


def multiplier_values(points: np.ndarray, kappa: float) -> np.ndarray:
    """
    Evaluate the multiplier m(s) = s**kappa elementwise.

    Integral exponents are evaluated by repeated multiplication so that the
    same value is produced for a grid point and for the closed-form
    rearrangement ((K - i)/(K - 1))**kappa.
    """
    if not np.isfinite(kappa) or kappa <= 0:
        raise InvalidArgumentError(f"Multiplier exponent must be > 0, got {kappa!r}")
    points = np.asarray(points, dtype=np.float64)
    if float(kappa).is_integer():
        result = np.ones_like(points)
        for _ in range(int(kappa)):
            result = result * points
        return result
    return np.power(points, float(kappa))
