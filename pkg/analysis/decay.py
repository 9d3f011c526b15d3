"""
Decay Fits
Least-squares fits of polynomial (σ_i = C·i^(-p)) and exponential
(σ_i = C·exp(-c·i)) decay laws to singular value spectra.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple, Union
import logging

import numpy as np
from scipy import stats

from spectra.spectrum import Spectrum
from utils.errors import InvalidArgumentError, RangeError

logger = logging.getLogger(__name__)

# r² values closer than this are reported as a tie
TIE_MARGIN = 1e-6
MIN_FIT_POINTS = 5


class DecayModel(str, Enum):
    POLYNOMIAL = "Polynomial"
    EXPONENTIAL = "Exponential"


@dataclass(frozen=True)
class DecayFit:
    """One fitted decay law; rate is p for Polynomial and c for Exponential."""

    model: DecayModel
    amplitude: float
    rate: float
    residual_sum_squares: float
    r_squared: float
    fit_range: Tuple[int, int]

    def predict(self, indices: Union[Sequence[int], np.ndarray]) -> np.ndarray:
        return reference_curve(self.model, indices, self.amplitude, self.rate)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model.value,
            "C": self.amplitude,
            "rate": self.rate,
            "rss": self.residual_sum_squares,
            "r2": self.r_squared,
            "range": list(self.fit_range),
        }


@dataclass(frozen=True)
class DecayComparison:
    polynomial: DecayFit
    exponential: DecayFit
    preferred: Optional[DecayModel]

    def fit(self, model: DecayModel) -> DecayFit:
        return self.polynomial if DecayModel(model) is DecayModel.POLYNOMIAL else self.exponential

    def to_dict(self) -> Dict[str, Any]:
        return {
            "polynomial": self.polynomial.to_dict(),
            "exponential": self.exponential.to_dict(),
            "preferred": None if self.preferred is None else self.preferred.value,
        }


def reference_curve(model: Union[str, DecayModel], indices: Union[Sequence[int], np.ndarray],
                    amplitude: float = 1.0, rate: float = 1.0) -> np.ndarray:
    """C·i^(-rate) or C·exp(-rate·i) at the given indices."""
    i = np.asarray(indices, dtype=np.float64)
    if DecayModel(model) is DecayModel.POLYNOMIAL:
        return amplitude * np.power(i, -rate)
    return amplitude * np.exp(-rate * i)


def _linear_fit(x: np.ndarray, y: np.ndarray) -> Tuple[float, float, float, float]:
    result = stats.linregress(x, y)
    residuals = y - (result.intercept + result.slope * x)
    rss = float(np.sum(residuals ** 2))
    total = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if total == 0.0 else max(0.0, 1.0 - rss / total)
    return float(result.slope), float(result.intercept), rss, r_squared


def fit_decay(spectrum: Union[Spectrum, Sequence[float], np.ndarray],
              index_range: Optional[Tuple[int, int]] = None) -> DecayComparison:
    """
    Fit both decay laws on log σ_i over an inclusive 1-based index range.

    Args:
        spectrum: Spectrum (or plain descending values)
        index_range: (i_lo, i_hi), default the whole spectrum

    Returns:
        DecayComparison; preferred is the model with the higher r², or None
        when the two are within TIE_MARGIN
    """
    values = spectrum.values if isinstance(spectrum, Spectrum) else np.asarray(spectrum, dtype=np.float64)
    lo, hi = index_range if index_range is not None else (1, len(values))
    lo, hi = int(lo), int(hi)
    if lo < 1 or hi > len(values) or lo > hi:
        raise RangeError(f"Fit range [{lo}, {hi}] outside spectrum of length {len(values)}",
                         index=hi if hi > len(values) else lo)
    if hi - lo + 1 < MIN_FIT_POINTS:
        raise InvalidArgumentError(f"Decay fit needs at least {MIN_FIT_POINTS} points, got {hi - lo + 1}")

    window = values[lo - 1:hi]
    bad = np.flatnonzero(~(window > 0))
    if bad.size:
        first = lo + int(bad[0])
        raise RangeError(f"Cannot fit decay: sigma_{first} = {window[bad[0]]!r} is not positive", index=first)

    indices = np.arange(lo, hi + 1, dtype=np.float64)
    log_sigma = np.log(window)

    slope, intercept, rss, r2 = _linear_fit(np.log(indices), log_sigma)
    polynomial = DecayFit(DecayModel.POLYNOMIAL, float(np.exp(intercept)), -slope, rss, r2, (lo, hi))

    slope, intercept, rss, r2 = _linear_fit(indices, log_sigma)
    exponential = DecayFit(DecayModel.EXPONENTIAL, float(np.exp(intercept)), -slope, rss, r2, (lo, hi))

    gap = polynomial.r_squared - exponential.r_squared
    if abs(gap) <= TIE_MARGIN:
        preferred = None
    else:
        preferred = DecayModel.POLYNOMIAL if gap > 0 else DecayModel.EXPONENTIAL
    logger.debug(
        f"fit_decay [{lo}, {hi}]: r2 poly={polynomial.r_squared:.6f} exp={exponential.r_squared:.6f} "
        f"-> {preferred.value if preferred else 'tie'}"
    )
    return DecayComparison(polynomial=polynomial, exponential=exponential, preferred=preferred)
