"""
Experiment Runner
Runs one experiment under the output-directory lock, emits CSV, JSON and
plot files, writes a hashed manifest and maintains the result cache.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional
import logging
import time

from experiments.config import ExperimentConfig, cache_key
from experiments.figures import FigureData, get_experiment
from results.emit import (
    emit_json_report,
    emit_plot_script,
    emit_spectrum_csv,
    emit_sweep_csv,
    emit_table_csv,
    read_spectrum_csv,
)
from results.store import ResultStore
from spectra.spectrum import Spectrum, SpectrumMethod
from utils.errors import OutputError
from utils.formatting import to_jsonable

logger = logging.getLogger(__name__)

REPORT_NAME = "report.json"


@dataclass
class ExperimentResult:
    """
    Outcome of run_experiment.

    On a cache hit the spectra are re-read from the restored CSV files and
    the analyses are available only through report.
    """

    config: ExperimentConfig
    directory: Path
    data: FigureData
    report: Dict[str, Any]
    timings: Dict[str, float] = field(default_factory=dict)
    files: List[Dict[str, Any]] = field(default_factory=list)
    cached: bool = False

    @property
    def spectra(self) -> Dict[str, Spectrum]:
        return self.data.spectra

    @property
    def fits(self):
        return self.data.fits

    @property
    def bounds(self):
        return self.data.bounds

    @property
    def studies(self):
        return self.data.studies


def _emit(data: FigureData, cfg: ExperimentConfig, directory: Path) -> List[Path]:
    files: List[Path] = []
    for name, spectrum in data.spectra.items():
        files.append(emit_spectrum_csv(spectrum, directory / f"{name}.csv"))
    for name, values in data.references.items():
        files.append(emit_spectrum_csv(values, directory / f"{name}.csv"))
    for name, study in data.studies.items():
        files.append(emit_sweep_csv(study.rows(), directory / f"{name}_sweep.csv"))
    for name, (header, rows) in data.tables.items():
        files.append(emit_table_csv(header, rows, directory / f"{name}.csv"))
    if data.plot is not None:
        files.append(emit_plot_script(data.plot, directory / f"plot_{cfg.label}.py"))
    return files


def build_report(cfg: ExperimentConfig, data: FigureData, timings: Dict[str, float], directory: Path) -> Dict[str, Any]:
    """Report as written to report.json."""
    spectra = {}
    for name, spectrum in data.spectra.items():
        info = spectrum.to_dict(include_values=False)
        info["leading"] = [float(v) for v in spectrum.values[:5]]
        spectra[name] = info
    return to_jsonable({
        "experiment": cfg.experiment,
        "output_dir": str(directory),
        "config": cfg.echo(),
        "cache_key": cache_key(cfg),
        "spectra": spectra,
        "fits": {name: fit.to_dict() for name, fit in data.fits.items()},
        "bounds": {name: report.to_dict() for name, report in data.bounds.items()},
        "studies": {name: study.to_dict() for name, study in data.studies.items()},
        "diagnostics": {name: table.to_dict() for name, table in data.diagnostics.items()},
        "notes": data.notes,
        "timings": timings,
    })


def _restore_spectra(report: Dict[str, Any], directory: Path) -> Dict[str, Spectrum]:
    spectra = {}
    for name, info in report.get("spectra", {}).items():
        values = read_spectrum_csv(directory / f"{name}.csv")
        spectra[name] = Spectrum.build(values, SpectrumMethod(info["method"]), info["rows"], info["cols"],
                                       requested_k=info["requested_k"], metadata=info["metadata"],
                                       rel_tol=info["tolerance"])
    return spectra


def run_experiment(cfg: ExperimentConfig, store: Optional[ResultStore] = None) -> ExperimentResult:
    """
    Run an experiment and persist its outputs.

    Args:
        cfg: Validated configuration (see build_config)
        store: Result store, default one rooted at cfg.output_dir

    Returns:
        ExperimentResult with the report and the file manifest
    """
    store = store or ResultStore(cfg.output_dir)
    key = cache_key(cfg)
    with store.lock():
        directory = store.experiment_dir(cfg.label)
        if cfg.use_cache:
            cached = store.load_cached(key, directory)
            if cached is not None:
                cached["cached"] = True
                data = FigureData(spectra=_restore_spectra(cached, directory))
                return ExperimentResult(cfg, directory, data, cached, cached.get("timings", {}),
                                        cached["files"], cached=True)

        logger.info(f"Running {cfg.label} (cache key {key})")
        started = time.perf_counter()
        data = get_experiment(cfg.experiment)(cfg)
        computed = time.perf_counter()
        files = _emit(data, cfg, directory)
        timings = {"compute": computed - started, "emit": time.perf_counter() - computed}

        report = build_report(cfg, data, timings, directory)
        files.append(emit_json_report(report, directory / REPORT_NAME))
        manifest = store.write_manifest(directory, files)
        bad = store.verify_manifest(directory, manifest)
        if bad:
            raise OutputError(str(directory), f"Manifest verification failed for {', '.join(bad)}")
        if cfg.use_cache:
            store.save_cache(key, directory, manifest, report)

    report["cached"] = False
    logger.info(f"{cfg.label}: wrote {len(manifest)} files to {directory} in {sum(timings.values()):.2f}s")
    return ExperimentResult(cfg, directory, data, report, timings, manifest, cached=False)
