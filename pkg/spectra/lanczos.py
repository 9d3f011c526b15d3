"""
Lanczos Bidiagonalization
Leading singular values of large or matrix-free operators by Golub-Kahan
bidiagonalization with full reorthogonalization.
"""

from dataclasses import dataclass, replace
from typing import Any, List, Optional, Tuple
import logging

import numpy as np
from scipy import linalg

from operators.discrete import as_operator
from spectra.spectrum import EPS, Spectrum, SpectrumMethod
from utils.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

DEFAULT_LANCZOS_TOL = 1e-10


@dataclass(frozen=True)
class LanczosConfig:
    """
    Settings for lanczos_topk.

    Args:
        k: Number of leading singular values
        max_iterations: Krylov dimension cap; default max(20k, 200), never above min(rows, cols)
        tol: Residual tolerance relative to σ_1
        seed: Seed of the random start vector
        check_interval: Bidiagonal SVDs are taken every this many steps once k steps are done
    """

    k: int
    max_iterations: Optional[int] = None
    tol: float = DEFAULT_LANCZOS_TOL
    seed: int = 0
    check_interval: int = 5

    def __post_init__(self):
        if self.k < 1:
            raise InvalidArgumentError(f"Lanczos k must be >= 1, got {self.k}")
        if self.max_iterations is not None and self.max_iterations < self.k:
            raise InvalidArgumentError(
                f"max_iterations ({self.max_iterations}) must be >= k ({self.k})"
            )
        if not self.tol > 0:
            raise InvalidArgumentError(f"Lanczos tol must be > 0, got {self.tol}")
        if self.check_interval < 1:
            raise InvalidArgumentError("check_interval must be >= 1")

    def with_k(self, k: int) -> "LanczosConfig":
        max_iterations = self.max_iterations
        if max_iterations is not None and max_iterations < k:
            max_iterations = None
        return replace(self, k=int(k), max_iterations=max_iterations)

    def iteration_cap(self, rows: int, cols: int) -> int:
        cap = self.max_iterations if self.max_iterations is not None else max(20 * self.k, 200)
        return min(cap, rows, cols)


def _reorthogonalize(w: np.ndarray, basis: np.ndarray) -> np.ndarray:
    # classical Gram-Schmidt applied twice
    for _ in range(2):
        w = w - basis @ (basis.T @ w)
    return w


def _fresh_direction(rng: np.random.Generator, basis: np.ndarray) -> np.ndarray:
    """Random unit vector orthogonal to the columns of basis."""
    for _ in range(3):
        w = _reorthogonalize(rng.standard_normal(basis.shape[0]), basis)
        norm = np.linalg.norm(w)
        if norm > 0:
            return w / norm
    raise InvalidArgumentError("Could not extend the Krylov basis")


def _ritz(alphas: List[float], betas: List[float]) -> Tuple[np.ndarray, np.ndarray]:
    """Singular values of the bidiagonal B and the residual estimates |β_last·P[last, i]|."""
    size = len(alphas)
    B = np.diag(alphas)
    if size > 1:
        B += np.diag(betas[:size - 1], 1)
    P, S, _ = linalg.svd(B)
    residuals = np.abs(betas[size - 1] * P[size - 1, :])
    return S, residuals


def lanczos_topk(op: Any, config: LanczosConfig) -> Spectrum:
    """
    Approximate σ_1..σ_k using only products with Op and Op*.

    A value counts as converged when its residual is at most tol·σ_1.
    Values still unconverged at the iteration cap are returned with
    converged=False and a warning; the Krylov basis is extended with a
    random orthogonal direction whenever the recurrence breaks down.

    Args:
        op: DiscreteOperator or 2-D array
        config: LanczosConfig

    Returns:
        Spectrum with method LanczosPartial
    """
    op = as_operator(op)
    m, n = op.rows, op.cols
    k = config.k
    if k > min(m, n):
        raise InvalidArgumentError(f"Lanczos k={k} exceeds min(rows, cols)={min(m, n)} for {op.name}")
    cap = config.iteration_cap(m, n)
    rng = np.random.default_rng(config.seed)

    V = np.zeros((n, cap))
    U = np.zeros((m, cap))
    alphas: List[float] = []
    betas: List[float] = []

    v = rng.standard_normal(n)
    V[:, 0] = v / np.linalg.norm(v)
    u = op.matvec(V[:, 0]).ravel()
    scale = 0.0
    steps = 0
    restarts = 0
    values, residuals = np.zeros(0), np.zeros(0)

    for j in range(cap):
        alpha = float(np.linalg.norm(u))
        scale = max(scale, alpha)
        if alpha <= 10 * EPS * max(scale, 1.0):
            alpha = 0.0
            U[:, j] = _fresh_direction(rng, U[:, :j])
            restarts += 1
        else:
            U[:, j] = u / alpha
        alphas.append(alpha)

        r = op.rmatvec(U[:, j]).ravel() - alpha * V[:, j]
        r = _reorthogonalize(r, V[:, :j + 1])
        beta = float(np.linalg.norm(r))
        scale = max(scale, beta)
        breakdown = beta <= 10 * EPS * max(scale, 1.0)
        betas.append(0.0 if breakdown else beta)
        steps = j + 1

        last = steps == cap
        if steps >= k and (last or breakdown or (steps - k) % config.check_interval == 0):
            values, residuals = _ritz(alphas, betas)
            if values[0] > 0.0 and np.all(residuals[:k] <= config.tol * values[0]):
                break
        if last:
            break

        if breakdown:
            V[:, j + 1] = _fresh_direction(rng, V[:, :j + 1])
            restarts += 1
        else:
            V[:, j + 1] = r / beta
        u = op.matvec(V[:, j + 1]).ravel() - betas[-1] * U[:, j]
        u = _reorthogonalize(u, U[:, :j + 1])

    if values.size < k:
        values, residuals = _ritz(alphas, betas)

    top = values[0] if values.size else 0.0
    converged = residuals[:k] <= config.tol * top if top > 0 else np.ones(k, dtype=bool)
    unconverged = int(np.count_nonzero(~converged))
    if unconverged:
        logger.warning(
            f"lanczos_topk {op.name}: {unconverged} of {k} values unconverged after {steps} iterations"
        )
    else:
        logger.debug(f"lanczos_topk {op.name}: {k} values converged in {steps} iterations")

    metadata = op.metadata
    metadata.update({
        "engine": "golub-kahan",
        "iterations": steps,
        "restarts": restarts,
        "lanczos_tol": config.tol,
        "seed": config.seed,
        "max_residual": float(np.max(residuals[:k])) if k else 0.0,
    })
    return Spectrum.build(values[:k], SpectrumMethod.LANCZOS_PARTIAL, m, n, requested_k=k,
                          metadata=metadata, converged=converged)
