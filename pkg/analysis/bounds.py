"""
Bound Checks
Per-index verification of singular value inequalities: the product
inequality, the Beckermann bound for truncated Hilbert matrices, the
composite moment bound, the norm ceiling ‖H‖ = π, and the limit of the
discrete multiplication operator.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Union
import logging
import math
import numbers

import numpy as np

from operators.grid import multiplier_values
from spectra.spectrum import EPS, Spectrum
from utils.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

# relative slack on the right-hand side of every checked inequality
RELATIVE_SLACK = 1e-12


@dataclass(frozen=True)
class BoundRecord:
    index: int
    lhs: float
    rhs: float
    satisfied: bool


@dataclass(frozen=True)
class BoundReport:
    """Per-index results of one inequality; overall_satisfied is their conjunction."""

    bound_name: str
    records: List[BoundRecord]
    parameters: Dict[str, Any] = field(default_factory=dict)

    @property
    def overall_satisfied(self) -> bool:
        return all(record.satisfied for record in self.records)

    @property
    def violations(self) -> List[BoundRecord]:
        return [record for record in self.records if not record.satisfied]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bound": self.bound_name,
            "overall_satisfied": self.overall_satisfied,
            "parameters": self.parameters,
            "records": [
                {"index": r.index, "lhs": r.lhs, "rhs": r.rhs, "satisfied": r.satisfied}
                for r in self.records
            ],
        }


def _holds(lhs: float, rhs: float, floor: float = 0.0) -> bool:
    return lhs <= rhs * (1.0 + RELATIVE_SLACK) + floor


def _rank_floor(spectrum: Spectrum, scale: float) -> float:
    return max(spectrum.rows, spectrum.cols) * EPS * scale


def beckermann_rho(n: Union[int, float]) -> float:
    """
    exp(π² / (2·ln(8n - 4))), the base of Beckermann's geometric decay rate.

    Decreases towards 1 as n grows; n may be as large as 10^30.
    """
    if isinstance(n, bool) or not isinstance(n, numbers.Real) or not math.isfinite(n) or n < 1:
        raise InvalidArgumentError(f"beckermann_rho needs n >= 1, got {n!r}")
    if isinstance(n, numbers.Integral):
        argument = 8 * int(n) - 4
    else:
        argument = 8.0 * float(n) - 4.0
    return math.exp(math.pi ** 2 / (2.0 * math.log(argument)))


def check_beckermann(spectrum: Spectrum, n: int) -> BoundReport:
    """
    Check σ_(i+1)(H_n) <= 4·ρ(n)^(-2i)·σ_1(H_n) for 1 <= i <= n - 1.

    Indices whose σ_(i+1) lies at or below the numerical-rank floor
    n·eps·σ_1 are skipped and listed in parameters['skipped'].
    """
    if spectrum.rows != n or spectrum.cols != n:
        raise InvalidArgumentError(
            f"Spectrum is {spectrum.rows}x{spectrum.cols}, expected H_n with n={n}"
        )
    rho = beckermann_rho(n)
    sigma_1 = spectrum.sigma(1)
    floor = _rank_floor(spectrum, sigma_1)
    records: List[BoundRecord] = []
    skipped: List[int] = []
    for i in range(1, min(n - 1, len(spectrum) - 1) + 1):
        lhs = spectrum.sigma(i + 1)
        if lhs <= floor:
            skipped.append(i)
            continue
        rhs = 4.0 * rho ** (-2.0 * i) * sigma_1
        records.append(BoundRecord(i, lhs, rhs, _holds(lhs, rhs, floor)))
    if skipped:
        logger.debug(f"check_beckermann n={n}: skipped {len(skipped)} indices below the rank floor")
    return BoundReport("beckermann", records,
                       {"n": n, "rho": rho, "rank_floor": floor, "skipped": skipped,
                        "checked": [r.index for r in records]})


def check_product_inequality(sA: Spectrum, sB: Spectrum, sAB: Spectrum) -> BoundReport:
    """
    Check σ_(2i)(AB) <= σ_i(A)·σ_i(B) for every i with 2i <= length(sAB).

    Args:
        sA: Spectrum of A (rows x inner)
        sB: Spectrum of B (inner x cols)
        sAB: Spectrum of the product (rows x cols)

    Returns:
        BoundReport named 'product_inequality'
    """
    if sA.cols != sB.rows or sAB.rows != sA.rows or sAB.cols != sB.cols:
        raise InvalidArgumentError(
            f"Non-conformable spectra: A {sA.rows}x{sA.cols}, B {sB.rows}x{sB.cols}, "
            f"AB {sAB.rows}x{sAB.cols}"
        )
    if len(sA) == 0 or len(sB) == 0:
        raise InvalidArgumentError("Product inequality needs non-empty factor spectra")
    floor = max(sA.rows, sA.cols, sB.cols) * EPS * sA.sigma(1) * sB.sigma(1)
    records = []
    for i in range(1, len(sAB) // 2 + 1):
        if i > len(sA) or i > len(sB):
            break
        lhs = sAB.sigma(2 * i)
        rhs = sA.sigma(i) * sB.sigma(i)
        records.append(BoundRecord(i, lhs, rhs, _holds(lhs, rhs, floor)))
    return BoundReport("product_inequality", records, {"rank_floor": floor, "indices": len(records)})


def check_composite_bound(spectrum: Spectrum, n: int) -> BoundReport:
    """Check σ_(2i)(B^H·J) <= 2·ρ(n)^(-i)·√π / i with n moments, above the rank floor."""
    if spectrum.rows != n:
        raise InvalidArgumentError(f"Spectrum has {spectrum.rows} rows, expected n={n} moments")
    rho = beckermann_rho(n)
    floor = _rank_floor(spectrum, spectrum.sigma(1))
    records = []
    skipped = []
    for i in range(1, len(spectrum) // 2 + 1):
        lhs = spectrum.sigma(2 * i)
        if lhs <= floor:
            skipped.append(i)
            continue
        rhs = 2.0 * rho ** (-float(i)) * math.sqrt(math.pi) / i
        records.append(BoundRecord(i, lhs, rhs, _holds(lhs, rhs, floor)))
    return BoundReport("composite_moment_bound", records,
                       {"n": n, "rho": rho, "rank_floor": floor, "skipped": skipped})


def check_hilbert_ceiling(spectrum: Spectrum) -> BoundReport:
    """σ_i(H_n) <= π for every computed index."""
    records = [BoundRecord(i, spectrum.sigma(i), math.pi, _holds(spectrum.sigma(i), math.pi))
               for i in range(1, len(spectrum) + 1)]
    return BoundReport("hilbert_ceiling", records, {"n": spectrum.rows})


def multiplication_sigma(kappa: float, K: int, i: int) -> float:
    """Closed form σ_i(M_K) = ((K - i)/(K - 1))^kappa of the K-point multiplication operator."""
    if isinstance(K, bool) or not isinstance(K, numbers.Integral) or K < 2:
        raise InvalidArgumentError(f"K must be an integer >= 2, got {K!r}")
    if isinstance(i, bool) or not isinstance(i, numbers.Integral) or not 1 <= i <= K:
        raise InvalidArgumentError(f"Index i must satisfy 1 <= i <= K={K}, got {i!r}")
    return float(multiplier_values(np.array([(K - i) / (K - 1)]), kappa)[0])


def multiplication_limit_check(kappa: float, K: int, i: int, epsilon: float) -> bool:
    """
    True when σ_i(M_K) > m_max - epsilon, with m_max = 1 for m(s) = s^kappa.

    Args:
        kappa: Multiplier exponent
        K: Number of grid points
        i: 1-based singular value index
        epsilon: Distance to the limit
    """
    if not epsilon > 0:
        raise InvalidArgumentError(f"epsilon must be > 0, got {epsilon!r}")
    return multiplication_sigma(kappa, K, i) > 1.0 - epsilon


def multiplication_threshold(kappa: float, i: int, epsilon: float) -> int:
    """Smallest K with σ_i(M_K) > 1 - epsilon."""
    if not 0 < epsilon < 1:
        raise InvalidArgumentError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if isinstance(i, bool) or not isinstance(i, numbers.Integral) or i < 1:
        raise InvalidArgumentError(f"Index i must be an integer >= 1, got {i!r}")
    if i == 1:
        return 2
    # ((K - i)/(K - 1)) > q  <=>  K > (i - q)/(1 - q)
    q = (1.0 - epsilon) ** (1.0 / kappa)
    K = max(i, 2, int(math.floor((i - q) / (1.0 - q))))
    while K > max(i, 2) and multiplication_limit_check(kappa, K - 1, i, epsilon):
        K -= 1
    while not multiplication_limit_check(kappa, K, i, epsilon):
        K += 1
    return K
