"""
Experiment Configuration
Validated experiment settings, desk-scale defaults and guards, and the
cache key.
"""

from typing import Any, Dict, List, Mapping, Optional
import hashlib
import json
import logging

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from operators.discrete import DENSE_ENTRY_LIMIT
from operators.grid import WeightingMode
from spectra.engines import ENGINES
from utils.errors import ConfigGuardError, InvalidArgumentError

logger = logging.getLogger(__name__)

FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7")
EXPERIMENTS = FIGURES + ("spectrum", "check")
SPECTRUM_OPERATORS = ("J", "BH", "BM", "A", "BMJ", "BHJ", "AstarA", "hilbert", "cholesky")

U64_MAX = 2 ** 64 - 1

# Fields that do not change computed values
NON_SEMANTIC_FIELDS = {"output_dir", "use_cache", "full_scale"}

DESK_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "fig1": {"N": 2000, "M": 2000, "k": 20, "fit_range": [1, 15]},
    "fig2": {"N": 2000, "M": 2000, "k": 100, "kappa": 4.0, "fit_range": [1, 50]},
    "fig3": {"N": 1000, "M": 1000, "j_max": [100, 1000, 10000, 20000], "indices": list(range(1, 11))},
    "fig4": {"n_max_exponent": 30, "samples": 121},
    "fig5": {"levels": [20, 40, 80, 160, 320], "indices": list(range(1, 11))},
    "fig6": {"N": 2000, "levels": [500, 1000, 2000, 4000], "k": 20, "indices": [1, 10, 20]},
    "fig7": {"levels": [100, 400, 1600, 6400], "kappa": 4.0, "indices": [1, 2, 5, 10]},
    "spectrum": {"operator": "J", "N": 500, "M": 500, "kappa": 4.0, "j_max": [1000], "k": 20},
    "check": {"N": 1000, "M": 1000, "levels": [8, 16, 32, 64, 128, 256], "trials": 100, "trial_size": 50},
}

# Upper limits at desk scale; exceeding any needs full_scale
DESK_LIMITS: Dict[str, int] = {
    "grid_points": 4000,
    "num_moments": 4000,
    "j_max": 20000,
    "hilbert_order": 1000,
    "multiplier_points": 100000,
    "dense_threshold": DENSE_ENTRY_LIMIT,
}


class ExperimentConfig(BaseModel):
    """
    Settings for one experiment run.

    Grid sizes: N input grid points, M output grid points (and moments).
    levels holds the swept discretization parameter (n, K or M);
    j_max the kernel truncations of fig3 (first entry for 'spectrum').
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    experiment: str
    N: Optional[int] = None
    M: Optional[int] = None
    kappa: float = 4.0
    j_max: List[int] = []
    levels: List[int] = []
    indices: List[int] = []
    k: Optional[int] = None
    fit_range: Optional[List[int]] = None
    operator: Optional[str] = None
    n_max_exponent: int = 30
    samples: int = 121
    trials: int = 100
    trial_size: int = 50
    weighting: WeightingMode = WeightingMode.PAPER_FAITHFUL
    engine: str = "auto"
    seed: int = 0
    lanczos_tolerance: float = 1e-10
    lanczos_max_iterations: Optional[int] = None
    kernel_tolerance: float = 1e-13
    output_dir: str = "results"
    use_cache: bool = True
    full_scale: bool = False

    @field_validator("experiment")
    @classmethod
    def _known_experiment(cls, value: str) -> str:
        if value not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {value!r}, expected one of {', '.join(EXPERIMENTS)}")
        return value

    @field_validator("engine")
    @classmethod
    def _known_engine(cls, value: str) -> str:
        if value not in ENGINES:
            raise ValueError(f"unknown engine {value!r}, expected one of {', '.join(ENGINES)}")
        return value

    @field_validator("operator")
    @classmethod
    def _known_operator(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value not in SPECTRUM_OPERATORS:
            raise ValueError(f"unknown operator {value!r}, expected one of {', '.join(SPECTRUM_OPERATORS)}")
        return value

    @field_validator("seed")
    @classmethod
    def _seed_range(cls, value: int) -> int:
        if not 0 <= value <= U64_MAX:
            raise ValueError("seed must be an unsigned 64-bit integer")
        return value

    @field_validator("j_max", "indices")
    @classmethod
    def _positive_entries(cls, value: List[int]) -> List[int]:
        if any(v < 1 for v in value):
            raise ValueError("entries must be >= 1")
        return value

    @model_validator(mode="after")
    def _sizes(self) -> "ExperimentConfig":
        for name in ("N", "M"):
            size = getattr(self, name)
            if size is not None and size < 2:
                raise ValueError(f"{name} must be >= 2, got {size}")
        if self.experiment in ("fig5", "check"):
            minimum = 1
        else:
            minimum = 2
        if any(level < minimum for level in self.levels):
            raise ValueError(f"levels must be >= {minimum}")
        if self.levels != sorted(set(self.levels)):
            raise ValueError("levels must be strictly ascending")
        if self.j_max != sorted(set(self.j_max)):
            raise ValueError("j_max values must be strictly ascending")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be >= 1")
        if self.fit_range is not None and (len(self.fit_range) != 2 or self.fit_range[0] < 1
                                           or self.fit_range[0] > self.fit_range[1]):
            raise ValueError("fit_range must be [i_lo, i_hi] with 1 <= i_lo <= i_hi")
        if not self.kappa > 0:
            raise ValueError("kappa must be > 0")
        if self.samples < 2 or self.n_max_exponent < 1:
            raise ValueError("fig4 needs samples >= 2 and n_max_exponent >= 1")
        if self.trials < 1 or self.trial_size < 2:
            raise ValueError("check needs trials >= 1 and trial_size >= 2")
        return self

    @property
    def label(self) -> str:
        """Directory name of the run under the output directory."""
        if self.experiment == "spectrum":
            return f"spectrum_{self.operator}"
        return self.experiment

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def cache_key(cfg: ExperimentConfig) -> str:
    """Stable sha256 over all fields that affect results."""
    payload = cfg.model_dump(mode="json", exclude=NON_SEMANTIC_FIELDS)
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:32]


def _dense_sizes(cfg: ExperimentConfig) -> List[int]:
    """rows·cols of the operators an experiment densifies."""
    e = cfg.experiment
    if e in ("fig1", "fig2"):
        return [cfg.N * cfg.M]
    if e == "fig3":
        return [cfg.N * cfg.N, cfg.M * cfg.N]
    if e == "fig6":
        return [level * cfg.N for level in cfg.levels]
    if e == "check":
        return [cfg.N * cfg.M]
    return []


def guard_violations(cfg: ExperimentConfig) -> List[ConfigGuardError]:
    """Every desk-scale guard the configuration exceeds."""
    found = []

    def check(guard: str, value: int, what: str) -> None:
        limit = DESK_LIMITS[guard]
        if value > limit:
            found.append(ConfigGuardError(guard, f"{what}={value} exceeds the desk limit {limit}; pass --full-scale"))

    e = cfg.experiment
    for name in ("N", "M"):
        size = getattr(cfg, name)
        if size is not None:
            check("grid_points", size, name)
    if e == "fig6":
        for level in cfg.levels:
            check("num_moments", level, "M")
    if cfg.j_max and e in ("fig3", "spectrum"):
        check("j_max", max(cfg.j_max), "j_max")
    if e in ("fig5", "check") and cfg.levels:
        check("hilbert_order", max(cfg.levels), "n")
    if e == "spectrum" and cfg.operator in ("hilbert", "cholesky"):
        check("hilbert_order", cfg.N, "n")
    if e == "fig7" and cfg.levels:
        check("multiplier_points", max(cfg.levels), "K")
    for entries in _dense_sizes(cfg):
        check("dense_threshold", entries, "dense entries")
    return found


def build_config(experiment: str, settings: Optional[Mapping[str, Any]] = None,
                 overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """
    Merge desk defaults < file/environment settings < CLI overrides.

    Args:
        experiment: Experiment id
        settings: Flat settings from config.yaml and the environment
        overrides: Values given on the command line (None entries are ignored)

    Returns:
        Validated ExperimentConfig

    Raises:
        InvalidArgumentError: invalid values
        ConfigGuardError: a desk-scale guard is exceeded without full_scale
    """
    fields = set(ExperimentConfig.model_fields)
    data: Dict[str, Any] = {"experiment": experiment}
    data.update(DESK_DEFAULTS.get(experiment, {}))
    for source in (settings or {}, overrides or {}):
        data.update({k: v for k, v in source.items() if k in fields and v is not None})
    data["experiment"] = experiment

    try:
        cfg = ExperimentConfig(**data)
    except ValidationError as e:
        details = "; ".join(f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors())
        raise InvalidArgumentError(f"Invalid configuration for {experiment}: {details}") from e

    violations = guard_violations(cfg)
    if violations:
        if not cfg.full_scale:
            raise violations[0]
        logger.warning(f"Full-scale run: {len(violations)} desk guards exceeded ({violations[0].guard}, ...)")
    return cfg
