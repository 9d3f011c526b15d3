"""Spectra module: singular values by dense SVD, symmetric eigensolvers and Lanczos."""

from .spectrum import Spectrum, SpectrumMethod, numerical_rank, default_rank_tolerance
from .lanczos import LanczosConfig, lanczos_topk
from .engines import full_svd, sym_eigs, diagonal_spectrum, compute_spectrum

__all__ = [
    "Spectrum",
    "SpectrumMethod",
    "numerical_rank",
    "default_rank_tolerance",
    "LanczosConfig",
    "lanczos_topk",
    "full_svd",
    "sym_eigs",
    "diagonal_spectrum",
    "compute_spectrum",
]
