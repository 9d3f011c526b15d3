"""
Convergence Studies
Tracks selected singular values across increasing discretization levels.
"""

from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Sequence, Tuple
import logging

import numpy as np

from spectra.spectrum import Spectrum
from utils.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

# absolute slack for the non-decreasing test
MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class ConvergenceStudy:
    """
    σ_i(level) for each tracked index.

    values has shape (len(levels), len(indices)); the per-index dictionaries
    are keyed by the 1-based index.
    """

    parameter: str
    levels: Tuple[int, ...]
    indices: Tuple[int, ...]
    values: np.ndarray
    monotone: Dict[int, bool]
    limit_candidate: Dict[int, float]
    relative_last_step: Dict[int, float]

    def sequence(self, index: int) -> np.ndarray:
        """σ_index across all levels."""
        if index not in self.indices:
            raise InvalidArgumentError(f"Index {index} is not tracked by this study")
        return self.values[:, self.indices.index(index)]

    @property
    def all_monotone(self) -> bool:
        return all(self.monotone.values())

    def rows(self) -> Iterator[Tuple[int, int, float]]:
        """(level, index, sigma) triples in level-major order."""
        for a, level in enumerate(self.levels):
            for b, index in enumerate(self.indices):
                yield level, index, float(self.values[a, b])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "parameter": self.parameter,
            "levels": list(self.levels),
            "indices": list(self.indices),
            "monotone": {str(i): v for i, v in self.monotone.items()},
            "limit_candidate": {str(i): v for i, v in self.limit_candidate.items()},
            "relative_last_step": {str(i): v for i, v in self.relative_last_step.items()},
        }


def convergence_study(levels: Sequence[int], spectra: Sequence[Spectrum], tracked_indices: Sequence[int],
                      parameter: str = "level") -> ConvergenceStudy:
    """
    Build a convergence study from one spectrum per level.

    Args:
        levels: Strictly ascending discretization levels (at least two)
        spectra: Spectrum per level, each covering every tracked index
        tracked_indices: 1-based indices to follow
        parameter: Name of the level parameter (n, K, M, j_max)

    Returns:
        ConvergenceStudy with monotonicity verdicts and last-step changes
    """
    levels = tuple(int(level) for level in levels)
    indices = tuple(int(i) for i in tracked_indices)
    if len(levels) < 2:
        raise InvalidArgumentError(f"A convergence study needs at least 2 levels, got {len(levels)}")
    if len(spectra) != len(levels):
        raise InvalidArgumentError(f"Got {len(spectra)} spectra for {len(levels)} levels")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise InvalidArgumentError(f"Levels must be strictly ascending, got {list(levels)}")
    if not indices or min(indices) < 1:
        raise InvalidArgumentError("Tracked indices must be non-empty and 1-based")

    table = np.empty((len(levels), len(indices)))
    for a, (level, spectrum) in enumerate(zip(levels, spectra)):
        missing = [i for i in indices if i > len(spectrum)]
        if missing:
            raise InvalidArgumentError(
                f"Spectrum at {parameter}={level} has {len(spectrum)} values; index {missing[0]} not covered"
            )
        table[a] = [spectrum.sigma(i) for i in indices]
    table.setflags(write=False)

    monotone: Dict[int, bool] = {}
    limits: Dict[int, float] = {}
    steps: Dict[int, float] = {}
    for b, index in enumerate(indices):
        column = table[:, b]
        monotone[index] = bool(np.all(np.diff(column) >= -MONOTONE_SLACK))
        last, previous = float(column[-1]), float(column[-2])
        limits[index] = last
        if last == previous:
            steps[index] = 0.0
        else:
            steps[index] = abs(last - previous) / abs(last) if last != 0.0 else float("inf")

    not_monotone: List[int] = [i for i, ok in monotone.items() if not ok]
    if not_monotone:
        logger.info(f"Convergence over {parameter}: indices {not_monotone} are not non-decreasing")
    return ConvergenceStudy(parameter, levels, indices, table, monotone, limits, steps)
