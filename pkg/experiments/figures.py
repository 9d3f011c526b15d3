"""
Experiment Definitions
One function per experiment (fig1..fig7, spectrum, check), registered by
name. Each computes its spectra and analyses and describes its plot; the
runner takes care of emission, caching and timing.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from analysis.bounds import (
    BoundRecord,
    BoundReport,
    beckermann_rho,
    check_beckermann,
    check_composite_bound,
    check_hilbert_ceiling,
    check_product_inequality,
    multiplication_limit_check,
    multiplication_sigma,
    multiplication_threshold,
)
from analysis.convergence import ConvergenceStudy, convergence_study
from analysis.decay import DecayComparison, DecayModel, fit_decay, reference_curve
from analysis.diagnostics import ProportionalityTable, proportionality_diagnostic
from experiments.config import ExperimentConfig
from operators.builders import build_AstarA, build_BH, build_BM, build_composite_A, build_J
from operators.discrete import DENSE_ENTRY_LIMIT, DiscreteOperator, ProductOperator, as_operator
from operators.grid import WeightingMode, make_grid
from operators.hilbert import (
    RATIONAL_ORDER_LIMIT,
    hilbert_cholesky,
    hilbert_matrix,
    hilbert_rayleigh_quotient,
    hilbert_reference_eigenvalues,
)
from results.emit import PlotSpec, SeriesSpec
from spectra.engines import compute_spectrum, diagonal_spectrum, full_svd, sym_eigs
from spectra.lanczos import LanczosConfig
from spectra.spectrum import Spectrum, numerical_rank
from utils.errors import InvalidArgumentError, RangeError

logger = logging.getLogger(__name__)

Table = Tuple[Tuple[str, ...], List[Tuple[Any, ...]]]


@dataclass
class FigureData:
    """Everything an experiment computed, keyed by series name."""

    spectra: Dict[str, Spectrum] = field(default_factory=dict)
    references: Dict[str, np.ndarray] = field(default_factory=dict)
    fits: Dict[str, DecayComparison] = field(default_factory=dict)
    bounds: Dict[str, BoundReport] = field(default_factory=dict)
    studies: Dict[str, ConvergenceStudy] = field(default_factory=dict)
    tables: Dict[str, Table] = field(default_factory=dict)
    diagnostics: Dict[str, ProportionalityTable] = field(default_factory=dict)
    notes: Dict[str, Any] = field(default_factory=dict)
    plot: Optional[PlotSpec] = None


ExperimentFn = Callable[[ExperimentConfig], FigureData]

REGISTRY: Dict[str, ExperimentFn] = {}


def experiment(name: str) -> Callable[[ExperimentFn], ExperimentFn]:
    """Register an experiment function under name."""

    def register(fn: ExperimentFn) -> ExperimentFn:
        REGISTRY[name] = fn
        return fn

    return register


def get_experiment(name: str) -> ExperimentFn:
    if name not in REGISTRY:
        raise InvalidArgumentError(f"No experiment named {name!r}")
    return REGISTRY[name]


def _spectrum(op: DiscreteOperator, cfg: ExperimentConfig, k: Optional[int]) -> Spectrum:
    lanczos = None
    if cfg.engine != "dense":
        lanczos = LanczosConfig(k=k or min(op.rows, op.cols), max_iterations=cfg.lanczos_max_iterations,
                                tol=cfg.lanczos_tolerance, seed=cfg.seed)
    spectrum = compute_spectrum(op, cfg.engine, k, lanczos)
    logger.info(f"{op.name}: {op.rows}x{op.cols}, sigma_1={spectrum.values[0]:.6g}, "
                f"rank={spectrum.numerical_rank} ({spectrum.method.value})")
    return spectrum


def _fit(data: FigureData, name: str, spectrum: Spectrum, index_range: Sequence[int]) -> None:
    lo, hi = index_range[0], min(index_range[1], len(spectrum))
    try:
        data.fits[name] = fit_decay(spectrum, (lo, hi))
    except (RangeError, InvalidArgumentError) as e:
        logger.warning(f"Decay fit of {name} over [{lo}, {hi}] skipped: {e}")
        data.notes[f"fit_skipped_{name}"] = str(e)


def _series(names: Sequence[str], data: FigureData) -> List[SeriesSpec]:
    series = [SeriesSpec(f"{name}.csv", name, style=".-") for name in names if name in data.spectra]
    series.extend(SeriesSpec(f"{name}.csv", name, style="--") for name in data.references)
    return series


def _tracked(indices: Sequence[int], limit: int) -> List[int]:
    kept = [i for i in indices if i <= limit]
    if len(kept) < len(indices):
        logger.info(f"Tracking indices {kept}; larger ones exceed the smallest level {limit}")
    if not kept:
        raise InvalidArgumentError(f"No tracked index fits the smallest level {limit}")
    return kept


@experiment("fig1")
def figure_1(cfg: ExperimentConfig) -> FigureData:
    """Spectra of J, B^H and A = B^H∘J with exponential and polynomial references."""
    data = FigureData()
    g_in, g_out = make_grid(cfg.N), make_grid(cfg.M)
    data.spectra["J"] = _spectrum(build_J(g_in, g_out, cfg.weighting), cfg, cfg.k)
    data.spectra["BH"] = _spectrum(build_BH(cfg.M, g_in, cfg.weighting), cfg, cfg.k)
    data.spectra["A"] = _spectrum(build_composite_A(cfg.M, g_in, cfg.weighting), cfg, cfg.k)

    indices = np.arange(1, cfg.k + 1)
    data.references["reference_exp"] = reference_curve(DecayModel.EXPONENTIAL, indices)
    data.references["reference_inv"] = reference_curve(DecayModel.POLYNOMIAL, indices)

    fit_range = cfg.fit_range or [1, 15]
    _fit(data, "J", data.spectra["J"], [1, cfg.k])
    _fit(data, "BH", data.spectra["BH"], fit_range)
    _fit(data, "A", data.spectra["A"], fit_range)

    data.diagnostics["A_vs_BH_J"] = proportionality_diagnostic(data.spectra["A"], data.spectra["BH"],
                                                               data.spectra["J"])
    data.plot = PlotSpec("Singular values of J, B^H and A", "index i", "sigma_i", "linear", "log",
                         _series(["J", "BH", "A"], data))
    return data


@experiment("fig2")
def figure_2(cfg: ExperimentConfig) -> FigureData:
    """Spectra of J, B^M and the product B^M∘J for m(s) = s^kappa."""
    data = FigureData()
    g_in, g_out = make_grid(cfg.N), make_grid(cfg.M)
    J = build_J(g_in, g_out, cfg.weighting)
    BM = build_BM(cfg.kappa, g_out)
    composite = ProductOperator([BM, J], metadata={"operator": "BMJ", "kappa": cfg.kappa,
                                                    "weighting": cfg.weighting.value})
    data.spectra["J"] = _spectrum(J, cfg, cfg.k)
    data.spectra["BM"] = diagonal_spectrum(BM, cfg.k)
    data.spectra["BMJ"] = _spectrum(composite, cfg, cfg.k)

    data.references["reference_inv"] = reference_curve(DecayModel.POLYNOMIAL, np.arange(1, cfg.k + 1))
    fit_range = cfg.fit_range or [1, 50]
    _fit(data, "J", data.spectra["J"], fit_range)
    _fit(data, "BMJ", data.spectra["BMJ"], fit_range)
    data.plot = PlotSpec(f"Singular values of J, B^M and B^M J (m(s) = s^{cfg.kappa:g})",
                         "index i", "sigma_i", "log", "log", _series(["J", "BM", "BMJ"], data))
    return data


@experiment("fig3")
def figure_3(cfg: ExperimentConfig) -> FigureData:
    """Eigenvalues of A*A for increasing kernel truncation, against σ_i(A)² and i^-3."""
    data = FigureData()
    grid = make_grid(cfg.N)
    names = []
    spectra = []
    for j_max in cfg.j_max:
        op = build_AstarA(grid, j_max, cfg.weighting, tol=cfg.kernel_tolerance)
        spectrum = sym_eigs(op, cfg.k)
        name = f"AstarA_j{j_max}"
        data.spectra[name] = spectrum
        data.notes[f"numerical_rank_{name}"] = numerical_rank(spectrum)
        logger.info(f"{name}: numerical rank {data.notes[f'numerical_rank_{name}']}")
        names.append(name)
        spectra.append(spectrum)

    # sym_eigs reports the core W^½·K·W^½, which is AᵀA for the l2-weighted A
    A = build_composite_A(cfg.M, grid, WeightingMode.L2_CONSISTENT)
    sigma_A = _spectrum(A, cfg, cfg.k)
    data.spectra["A"] = sigma_A
    length = len(spectra[-1])
    data.references["A_squared"] = sigma_A.values ** 2
    data.references["reference_cubic"] = reference_curve(DecayModel.POLYNOMIAL, np.arange(1, length + 1), rate=3.0)

    tracked = _tracked(cfg.indices, min(len(s) for s in spectra))
    if len(cfg.j_max) >= 2:
        data.studies["j_max"] = convergence_study(cfg.j_max, spectra, tracked, parameter="j_max")
    data.plot = PlotSpec("Eigenvalues of A*A for several j_max", "index i", "lambda_i", "log", "log",
                         _series(names, data))
    return data


@experiment("fig4")
def figure_4(cfg: ExperimentConfig) -> FigureData:
    """rho(n) = exp(π²/(2 ln(8n - 4))) over log-spaced n."""
    data = FigureData()
    exponents = np.linspace(0.0, float(cfg.n_max_exponent), cfg.samples)
    rows = [(float(10.0 ** e), beckermann_rho(float(10.0 ** e))) for e in exponents]
    data.tables["rho"] = (("n", "rho"), rows)
    rho = [r for _, r in rows]
    data.notes["rho_endpoint"] = rho[-1]
    data.notes["strictly_decreasing"] = bool(all(b < a for a, b in zip(rho, rho[1:])))
    data.plot = PlotSpec("Beckermann rate term rho(n)", "n", "rho(n)", "log", "linear",
                         [SeriesSpec("rho.csv", "rho(n)", x="n", y="rho")])
    return data


@experiment("fig5")
def figure_5(cfg: ExperimentConfig) -> FigureData:
    """Singular values of truncated Hilbert matrices H_n over n, with Beckermann and π checks."""
    data = FigureData()
    spectra = []
    rows = []
    for n in cfg.levels:
        H = hilbert_matrix(n, exact=False)
        spectrum = full_svd(as_operator(H.matrix, f"H_{n}"))
        data.spectra[f"H_{n}"] = spectrum
        data.bounds[f"beckermann_n{n}"] = check_beckermann(spectrum, n)
        data.bounds[f"ceiling_n{n}"] = check_hilbert_ceiling(spectrum)
        rows.append((n, spectrum.sigma(1), hilbert_rayleigh_quotient(n)))
        spectra.append(spectrum)
    data.tables["sigma1"] = (("n", "sigma_1", "rayleigh"), rows)
    tracked = _tracked(cfg.indices, min(cfg.levels))
    data.studies["n"] = convergence_study(cfg.levels, spectra, tracked, parameter="n")
    series = [SeriesSpec(f"H_{n}.csv", f"n={n}", style=".-") for n in cfg.levels]
    data.plot = PlotSpec("Singular values of H_n", "index i", "sigma_i", "linear", "log", series)
    return data


@experiment("fig6")
def figure_6(cfg: ExperimentConfig) -> FigureData:
    """σ_i(A) on a fixed grid as the number of moments M grows."""
    data = FigureData()
    grid = make_grid(cfg.N)
    k = max(cfg.k or 1, max(cfg.indices))
    spectra = []
    for M in cfg.levels:
        spectrum = _spectrum(build_composite_A(M, grid, cfg.weighting), cfg, k)
        data.spectra[f"A_M{M}"] = spectrum
        spectra.append(spectrum)
    tracked = _tracked(cfg.indices, min(len(s) for s in spectra))
    data.studies["M"] = convergence_study(cfg.levels, spectra, tracked, parameter="M")
    data.plot = PlotSpec("Singular values of A versus the number of moments M", "M", "sigma_i", "log", "log",
                         [SeriesSpec("M_sweep.csv", "sigma", x="level", y="sigma", group="index", style="o-")])
    return data


@experiment("fig7")
def figure_7(cfg: ExperimentConfig) -> FigureData:
    """Exact spectra of the K-point multiplication operator and their limit 1."""
    data = FigureData()
    spectra = []
    closed_rows = []
    tracked = _tracked(cfg.indices, min(cfg.levels))
    for K in cfg.levels:
        spectrum = diagonal_spectrum(build_BM(cfg.kappa, make_grid(K)))
        data.spectra[f"M_K{K}"] = spectrum
        spectra.append(spectrum)
        closed = np.array([multiplication_sigma(cfg.kappa, K, i) for i in range(1, K + 1)])
        data.notes[f"closed_form_exact_K{K}"] = bool(np.array_equal(closed, spectrum.values))
        for i in tracked:
            closed_rows.append((K, i, spectrum.sigma(i), bool(multiplication_limit_check(cfg.kappa, K, i, 0.01))))
    data.tables["limit"] = (("K", "index", "sigma", "within_0.01"), closed_rows)
    for i in tracked:
        data.notes[f"threshold_K_index{i}_eps0.01"] = multiplication_threshold(cfg.kappa, i, 0.01)
    if len(cfg.levels) >= 2:
        data.studies["K"] = convergence_study(cfg.levels, spectra, tracked, parameter="K")
    series = [SeriesSpec(f"M_K{K}.csv", f"K={K}", style="-") for K in cfg.levels]
    data.plot = PlotSpec(f"Singular values of M_K (m(s) = s^{cfg.kappa:g})", "index i", "sigma_i",
                         "log", "linear", series)
    return data


def _spectrum_operator(cfg: ExperimentConfig) -> Tuple[Any, str]:
    """The operator named by cfg.operator and the engine that suits it."""
    name = cfg.operator
    g_in, g_out = make_grid(cfg.N), make_grid(cfg.M)
    mode = cfg.weighting
    if name == "J":
        return build_J(g_in, g_out, mode), "compute"
    if name == "BH":
        return build_BH(cfg.M, g_in, mode), "compute"
    if name == "BM":
        return build_BM(cfg.kappa, g_in), "compute"
    if name == "A":
        return build_composite_A(cfg.M, g_in, mode), "compute"
    if name == "BMJ":
        return ProductOperator([build_BM(cfg.kappa, g_out), build_J(g_in, g_out, mode)],
                               metadata={"operator": "BMJ", "kappa": cfg.kappa}), "compute"
    if name == "BHJ":
        return ProductOperator([build_BH(cfg.M, g_out, mode), build_J(g_in, g_out, mode)],
                               metadata={"operator": "BHJ"}), "compute"
    if name == "AstarA":
        j_max = cfg.j_max[0] if cfg.j_max else 1000
        matrix_free = cfg.N * cfg.N > DENSE_ENTRY_LIMIT
        op = build_AstarA(g_in, j_max, mode, matrix_free=matrix_free, tol=cfg.kernel_tolerance)
        return op, "compute" if matrix_free else "symmetric"
    if name == "hilbert":
        return as_operator(hilbert_matrix(cfg.N, exact=False).matrix, f"H_{cfg.N}"), "compute"
    return as_operator(hilbert_cholesky(cfg.N, exact=False).matrix, f"L_{cfg.N}"), "compute"


@experiment("spectrum")
def spectrum_study(cfg: ExperimentConfig) -> FigureData:
    """Ad-hoc spectrum of one operator with its decay fits."""
    data = FigureData()
    op, route = _spectrum_operator(cfg)
    spectrum = sym_eigs(op, cfg.k) if route == "symmetric" else _spectrum(op, cfg, cfg.k)
    data.spectra[cfg.operator] = spectrum
    data.notes["numerical_rank"] = spectrum.numerical_rank
    if len(spectrum) >= 5:
        _fit(data, cfg.operator, spectrum, cfg.fit_range or [1, len(spectrum)])
    data.plot = PlotSpec(f"Singular values of {cfg.operator}", "index i", "sigma_i", "linear", "log",
                         _series([cfg.operator], data))
    return data


def _product_trials(cfg: ExperimentConfig) -> BoundReport:
    """Product inequality on random square pairs; one record per trial (max lhs/rhs ratio)."""
    rng = np.random.default_rng(cfg.seed)
    size = cfg.trial_size
    records = []
    for trial in range(1, cfg.trials + 1):
        A = rng.standard_normal((size, size))
        B = rng.standard_normal((size, size))
        report = check_product_inequality(full_svd(A), full_svd(B), full_svd(A @ B))
        ratio = max(r.lhs / r.rhs if r.rhs > 0 else 0.0 for r in report.records)
        records.append(BoundRecord(trial, ratio, 1.0, report.overall_satisfied))
    return BoundReport("product_inequality_random", records, {"trials": cfg.trials, "size": size, "seed": cfg.seed})


def _cholesky_report() -> BoundReport:
    """Exact identity L·Lᵀ = H_n and σ_i(L_n)² = σ_i(H_n) for n ≤ 12; lhs is the worst relative deviation."""
    records = []
    for n in range(1, RATIONAL_ORDER_LIMIT + 1):
        factor = hilbert_cholesky(n, exact=True)
        exact = factor.verify_identity()
        squared = full_svd(factor.matrix).values ** 2
        reference = hilbert_reference_eigenvalues(n)
        usable = reference >= 1e-8
        deviation = float(np.max(np.abs(squared[usable] - reference[usable]) / reference[usable]))
        records.append(BoundRecord(n, deviation, 1e-10, bool(exact and deviation <= 1e-10)))
    return BoundReport("cholesky_identity", records, {"max_order": RATIONAL_ORDER_LIMIT})


@experiment("check")
def bound_checks(cfg: ExperimentConfig) -> FigureData:
    """Bound reports: Beckermann and π ceiling per n, product inequality, composite bound, Cholesky identities."""
    data = FigureData()
    for n in cfg.levels:
        spectrum = full_svd(hilbert_matrix(n, exact=False).matrix)
        data.bounds[f"beckermann_n{n}"] = check_beckermann(spectrum, n)
        data.bounds[f"ceiling_n{n}"] = check_hilbert_ceiling(spectrum)

    data.bounds["product_inequality_random"] = _product_trials(cfg)

    g_in, g_out = make_grid(cfg.N), make_grid(cfg.M)
    BH = build_BH(cfg.M, g_out, cfg.weighting)
    J = build_J(g_in, g_out, cfg.weighting)
    s_BH, s_J = full_svd(BH), full_svd(J)
    s_BHJ = full_svd(ProductOperator([BH, J], metadata={"operator": "BHJ"}))
    data.spectra.update({"BH": s_BH, "J": s_J, "BHJ": s_BHJ})
    data.bounds["product_inequality_BH_J"] = check_product_inequality(s_BH, s_J, s_BHJ)
    # diagnostic companion; not part of the overall verdict
    data.notes["composite_bound"] = check_composite_bound(s_BHJ, cfg.M).to_dict()

    data.bounds["cholesky_identity"] = _cholesky_report()
    data.notes["all_satisfied"] = all(report.overall_satisfied for report in data.bounds.values())
    data.plot = PlotSpec("Spectra entering the product inequality", "index i", "sigma_i", "linear", "log",
                         _series(["BH", "J", "BHJ"], data))
    return data
