"""
Experiment Tests
Configuration merging and guards, cache keys, and small end-to-end runs of
every experiment through the runner.
"""

import json

import numpy as np
import pytest

from analysis import multiplication_sigma
from experiments import (
    DESK_DEFAULTS,
    REGISTRY,
    build_config,
    cache_key,
    get_experiment,
    guard_violations,
    run_experiment,
)
from operators import WeightingMode
from results import ResultStore
from results.emit import read_spectrum_csv
from utils.errors import ConfigGuardError, InvalidArgumentError, LockError


def _config(experiment, tmp_path, **overrides):
    overrides.setdefault("output_dir", str(tmp_path / "out"))
    return build_config(experiment, overrides=overrides)


class TestBuildConfig:
    def test_desk_defaults(self):
        cfg = build_config("fig3")
        assert cfg.N == 1000
        assert cfg.j_max == [100, 1000, 10000, 20000]
        assert cfg.weighting is WeightingMode.PAPER_FAITHFUL
        assert guard_violations(cfg) == []

    def test_every_default_is_within_the_guards(self):
        for name in DESK_DEFAULTS:
            assert guard_violations(build_config(name)) == []

    def test_precedence(self):
        cfg = build_config("fig1", settings={"seed": 1, "weighting": "l2", "log_level": "DEBUG"},
                           overrides={"seed": 2, "k": None})
        assert cfg.seed == 2
        assert cfg.k == 20
        assert cfg.weighting is WeightingMode.L2_CONSISTENT

    def test_guard_names_the_violated_limit(self):
        with pytest.raises(ConfigGuardError) as excinfo:
            build_config("fig1", overrides={"N": 5000})
        assert excinfo.value.guard == "grid_points"

    def test_full_scale_lifts_guards(self, caplog):
        cfg = build_config("fig3", overrides={"j_max": [100, 200000], "full_scale": True})
        assert cfg.j_max[-1] == 200000
        assert "desk guards exceeded" in caplog.text

    def test_hilbert_order_guard(self):
        with pytest.raises(ConfigGuardError) as excinfo:
            build_config("fig5", overrides={"levels": [20, 2000]})
        assert excinfo.value.guard == "hilbert_order"

    @pytest.mark.parametrize("overrides", [
        {"N": 1},
        {"levels": [40, 20]},
        {"fit_range": [5, 2]},
        {"engine": "arpack"},
        {"seed": -1},
        {"kappa": 0.0},
    ])
    def test_invalid_values(self, overrides):
        with pytest.raises(InvalidArgumentError):
            build_config("fig1", overrides=overrides)

    def test_unknown_experiment(self):
        with pytest.raises(InvalidArgumentError):
            build_config("fig8")

    def test_unknown_operator(self):
        with pytest.raises(InvalidArgumentError):
            build_config("spectrum", overrides={"operator": "Laplace"})

    def test_label(self):
        assert build_config("spectrum", overrides={"operator": "BH"}).label == "spectrum_BH"
        assert build_config("fig2").label == "fig2"


class TestCacheKey:
    def test_stable(self):
        assert cache_key(build_config("fig3")) == cache_key(build_config("fig3"))

    def test_semantic_fields_change_the_key(self):
        base = cache_key(build_config("fig3"))
        assert cache_key(build_config("fig3", overrides={"j_max": [100, 1000]})) != base
        assert cache_key(build_config("fig3", overrides={"seed": 3})) != base

    def test_output_location_does_not(self):
        base = cache_key(build_config("fig3"))
        assert cache_key(build_config("fig3", overrides={"output_dir": "/elsewhere", "use_cache": False})) == base


def test_registry_covers_every_experiment():
    assert set(REGISTRY) == set(DESK_DEFAULTS)
    with pytest.raises(InvalidArgumentError):
        get_experiment("fig0")


class TestRunner:
    def test_multiplication_csv(self, tmp_path):
        result = run_experiment(_config("fig7", tmp_path, levels=[5]))
        csv_path = result.directory / "M_K5.csv"
        assert csv_path.read_text() == "index,sigma\n1,1\n2,0.31640625\n3,0.0625\n4,0.00390625\n5,0\n"
        assert result.report["notes"]["closed_form_exact_K5"] is True
        assert not result.cached

    def test_manifest_lists_every_emitted_file(self, tmp_path):
        result = run_experiment(_config("fig4", tmp_path, samples=7))
        emitted = {p.name for p in result.directory.iterdir()} - {"manifest.json"}
        assert {entry["path"] for entry in result.files} == emitted
        assert ResultStore.verify_manifest(result.directory, result.files) == []
        assert {"rho.csv", "report.json", "plot_fig4.py"} <= emitted

    def test_report_contents(self, tmp_path):
        result = run_experiment(_config("fig4", tmp_path, samples=7))
        report = json.loads((result.directory / "report.json").read_text())
        assert report["config"]["experiment"] == "fig4"
        assert report["notes"]["rho_endpoint"] == pytest.approx(1.072, abs=1e-3)
        assert report["notes"]["strictly_decreasing"] is True
        assert set(report["timings"]) == {"compute", "emit"}
        assert (result.directory / "rho.csv").read_text().startswith("n,rho\n")

    def test_cache_hit_reproduces_files(self, tmp_path):
        cfg = _config("fig7", tmp_path, levels=[50, 200])
        first = run_experiment(cfg)
        before = {p.name: p.read_bytes() for p in first.directory.glob("*.csv")}
        second = run_experiment(cfg)
        assert second.cached
        assert second.report["cached"] is True
        assert {p.name: p.read_bytes() for p in second.directory.glob("*.csv")} == before
        np.testing.assert_array_equal(second.spectra["M_K200"].values, first.spectra["M_K200"].values)

    def test_tampered_cache_recomputes(self, tmp_path, caplog):
        cfg = _config("fig7", tmp_path, levels=[50, 200])
        run_experiment(cfg)
        store = ResultStore(cfg.output_dir)
        cached_csv = next(store.cache_root.glob("*/M_K50.csv"))
        cached_csv.write_text("index,sigma\n1,2\n")
        result = run_experiment(cfg)
        assert not result.cached
        assert "hash verification" in caplog.text
        assert read_spectrum_csv(result.directory / "M_K50.csv")[0] == 1.0

    def test_no_cache_runs_are_deterministic(self, tmp_path):
        first = run_experiment(_config("fig7", tmp_path, output_dir=str(tmp_path / "a"), use_cache=False))
        second = run_experiment(_config("fig7", tmp_path, output_dir=str(tmp_path / "b"), use_cache=False))
        for path in first.directory.glob("*.csv"):
            assert (second.directory / path.name).read_bytes() == path.read_bytes()
        assert not (tmp_path / "a" / ".cache").exists()

    def test_locked_output_directory(self, tmp_path):
        cfg = _config("fig4", tmp_path, samples=3)
        store = ResultStore(cfg.output_dir)
        with store.lock():
            with pytest.raises(LockError):
                run_experiment(cfg, store)


class TestFigures:
    def test_fig1(self, tmp_path):
        result = run_experiment(_config("fig1", tmp_path, N=60, M=60, k=10, fit_range=[1, 8]))
        assert set(result.spectra) == {"J", "BH", "A"}
        assert (result.directory / "reference_exp.csv").exists()
        assert "A_vs_BH_J" in result.report["diagnostics"]
        assert "J" in result.fits
        script = (result.directory / "plot_fig1.py").read_text()
        for name in ("J.csv", "BH.csv", "A.csv", "reference_exp.csv", "reference_inv.csv"):
            assert name in script

    def test_fig2(self, tmp_path):
        result = run_experiment(_config("fig2", tmp_path, N=60, M=60, k=20, fit_range=[1, 15]))
        assert set(result.spectra) == {"J", "BM", "BMJ"}
        assert result.spectra["BM"].sigma(1) == 1.0
        assert "ax.set_xscale('log')" in (result.directory / "plot_fig2.py").read_text()

    def test_fig3(self, tmp_path):
        result = run_experiment(_config("fig3", tmp_path, N=100, M=100, j_max=[10, 100], indices=[1, 2, 3]))
        assert result.config.weighting is WeightingMode.PAPER_FAITHFUL
        squared = result.data.references["A_squared"][:10]
        np.testing.assert_allclose(squared, result.spectra["AstarA_j100"].values[:10], rtol=0.05)
        study = result.studies["j_max"]
        assert study.all_monotone
        assert "numerical_rank_AstarA_j100" in result.report["notes"]
        assert (result.directory / "j_max_sweep.csv").read_text().startswith("level,index,sigma\n")

    def test_fig5(self, tmp_path):
        result = run_experiment(_config("fig5", tmp_path, levels=[4, 8, 16], indices=[1, 2, 3]))
        assert result.studies["n"].all_monotone
        assert all(report.overall_satisfied for report in result.bounds.values())
        assert (result.directory / "sigma1.csv").read_text().startswith("n,sigma_1,rayleigh\n")

    def test_fig6(self, tmp_path):
        result = run_experiment(_config("fig6", tmp_path, N=50, levels=[10, 20, 40], k=5, indices=[1, 5]))
        study = result.studies["M"]
        assert study.levels == (10, 20, 40)
        assert study.monotone[1]

    def test_fig7_thresholds(self, tmp_path):
        result = run_experiment(_config("fig7", tmp_path))
        notes = result.report["notes"]
        assert notes["threshold_K_index1_eps0.01"] == 2
        assert notes["closed_form_exact_K6400"] is True
        assert list(result.studies["K"].sequence(10)) == [multiplication_sigma(4, K, 10) for K in (100, 400, 1600, 6400)]

    @pytest.mark.parametrize("operator,extra", [
        ("J", {"N": 40, "M": 30, "k": 5}),
        ("BH", {"N": 40, "M": 30, "k": 5}),
        ("BM", {"N": 40, "k": 5}),
        ("A", {"N": 40, "M": 30, "k": 5}),
        ("BMJ", {"N": 40, "M": 30, "k": 5}),
        ("BHJ", {"N": 40, "M": 30, "k": 5}),
        ("AstarA", {"N": 30, "j_max": [50], "k": 5}),
        ("hilbert", {"N": 10}),
        ("cholesky", {"N": 10}),
    ])
    def test_spectrum_command(self, tmp_path, operator, extra):
        result = run_experiment(_config("spectrum", tmp_path, operator=operator, **extra))
        assert result.directory.name == f"spectrum_{operator}"
        assert (result.directory / f"{operator}.csv").exists()
        assert result.report["notes"]["numerical_rank"] >= 1

    def test_lanczos_engine_is_deterministic(self, tmp_path):
        runs = [run_experiment(_config("spectrum", tmp_path, output_dir=str(tmp_path / d), operator="J",
                                       N=300, M=300, k=8, engine="lanczos", use_cache=False))
                for d in ("a", "b")]
        assert runs[0].spectra["J"].method.value == "LanczosPartial"
        assert (runs[0].directory / "J.csv").read_bytes() == (runs[1].directory / "J.csv").read_bytes()

    def test_check(self, tmp_path):
        result = run_experiment(_config("check", tmp_path, N=40, M=40, levels=[4, 8], trials=3, trial_size=6))
        assert result.report["notes"]["all_satisfied"] is True
        assert len(result.bounds["product_inequality_random"].records) == 3
        assert [r.index for r in result.bounds["cholesky_identity"].records] == list(range(1, 13))
        assert "composite_bound" in result.report["notes"]
