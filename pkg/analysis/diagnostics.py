"""
Proportionality Diagnostic
Ratios σ_i(composite) / (σ_i(factor 1)·σ_i(factor 2)); reported, never judged.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple
import logging

import numpy as np
from scipy import stats

from spectra.spectrum import Spectrum
from utils.errors import InvalidArgumentError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProportionalityTable:
    indices: Tuple[int, ...]
    ratios: Tuple[float, ...]
    excluded: Tuple[int, ...]
    minimum: Optional[float]
    maximum: Optional[float]
    geometric_mean: Optional[float]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "indices": list(self.indices),
            "ratios": list(self.ratios),
            "excluded": list(self.excluded),
            "min": self.minimum,
            "max": self.maximum,
            "geometric_mean": self.geometric_mean,
        }


def proportionality_diagnostic(s_composite: Spectrum, s_factor1: Spectrum, s_factor2: Spectrum,
                               index_range: Optional[Tuple[int, int]] = None) -> ProportionalityTable:
    """
    Per-index ratio table with min, max and geometric mean.

    Indices where a factor value is zero are excluded and listed.
    """
    overlap = min(len(s_composite), len(s_factor1), len(s_factor2))
    lo, hi = index_range if index_range is not None else (1, overlap)
    if lo < 1 or hi > overlap or lo > hi:
        raise InvalidArgumentError(f"Index range [{lo}, {hi}] is not covered by all three spectra (overlap {overlap})")

    indices: List[int] = []
    ratios: List[float] = []
    excluded: List[int] = []
    for i in range(lo, hi + 1):
        denominator = s_factor1.sigma(i) * s_factor2.sigma(i)
        if denominator == 0.0:
            excluded.append(i)
            continue
        indices.append(i)
        ratios.append(s_composite.sigma(i) / denominator)

    if excluded:
        logger.info(f"Proportionality: excluded indices with zero denominators {excluded}")
    if not ratios:
        return ProportionalityTable((), (), tuple(excluded), None, None, None)
    values = np.asarray(ratios)
    positive = values[values > 0]
    geometric = float(stats.gmean(positive)) if positive.size == values.size else None
    return ProportionalityTable(tuple(indices), tuple(ratios), tuple(excluded),
                                float(values.min()), float(values.max()), geometric)
