"""Analysis module: decay fits, bound checks, convergence studies and diagnostics."""

from .decay import DecayModel, DecayFit, DecayComparison, fit_decay, reference_curve
from .bounds import (
    BoundRecord,
    BoundReport,
    beckermann_rho,
    check_beckermann,
    check_product_inequality,
    check_composite_bound,
    check_hilbert_ceiling,
    multiplication_sigma,
    multiplication_limit_check,
    multiplication_threshold,
)
from .convergence import ConvergenceStudy, convergence_study
from .diagnostics import ProportionalityTable, proportionality_diagnostic

__all__ = [
    "DecayModel",
    "DecayFit",
    "DecayComparison",
    "fit_decay",
    "reference_curve",
    "BoundRecord",
    "BoundReport",
    "beckermann_rho",
    "check_beckermann",
    "check_product_inequality",
    "check_composite_bound",
    "check_hilbert_ceiling",
    "multiplication_sigma",
    "multiplication_limit_check",
    "multiplication_threshold",
    "ConvergenceStudy",
    "convergence_study",
    "ProportionalityTable",
    "proportionality_diagnostic",
]
