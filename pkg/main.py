"""
Spectral Lab - Main Entry Point
Command-line runner for the singular value experiments on the Hausdorff
moment, integration and multiplication operators and the Hilbert matrix.
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional

import yaml
from dotenv import load_dotenv

from experiments.config import FIGURES, SPECTRUM_OPERATORS, build_config
from experiments.runner import run_experiment
from results.store import ResultStore
from utils.console import highlight, setup_logging
from utils.errors import ErrorReporter, InvalidArgumentError
from utils.formatting import format_result_summary

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "SPECLAB_OUTPUT_DIR"

DEFAULTS: Dict[str, Any] = {
    "output_dir": "results",
    "seed": 0,
    "weighting": "paper",
    "engine": "auto",
    "use_cache": True,
    "full_scale": False,
    "log_level": "INFO",
    "log_detailed_errors": False,
    "lanczos_tolerance": 1e-10,
    "lanczos_max_iterations": None,
    "kernel_tolerance": 1e-13,
}


def load_config(config_path: str = "config.yaml") -> Dict[str, Any]:
    """Load the flat configuration from YAML with .env overrides."""
    script_dir = os.path.dirname(os.path.abspath(__file__))
    if not os.path.isabs(config_path):
        config_path = os.path.join(script_dir, config_path)

    config = dict(DEFAULTS)
    if os.path.exists(config_path):
        try:
            with open(config_path, "r") as f:
                loaded = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise InvalidArgumentError(f"Error parsing config file {config_path}: {e}") from e
        if not isinstance(loaded, dict) or any(isinstance(v, dict) for v in loaded.values()):
            raise InvalidArgumentError(f"{config_path} must be a flat key: value mapping")
        unknown = sorted(set(loaded) - set(DEFAULTS))
        if unknown:
            raise InvalidArgumentError(f"Unknown keys in {config_path}: {', '.join(unknown)}")
        config.update({k: v for k, v in loaded.items() if v is not None})
        logger.debug(f"Configuration loaded from {config_path}")
    else:
        logger.debug(f"Config file not found: {config_path}, using defaults")

    # Priority: .env -> config.yaml
    load_dotenv()
    if os.getenv(OUTPUT_DIR_ENV):
        config["output_dir"] = os.getenv(OUTPUT_DIR_ENV)
    return config


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _size_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--N", type=int, help="input grid points")
    parser.add_argument("--M", type=int, help="output grid points / number of moments")
    parser.add_argument("--k", type=int, help="number of leading singular values")
    parser.add_argument("--kappa", type=float, help="multiplier exponent of m(s) = s^kappa")
    parser.add_argument("--j-max", dest="j_max", type=_int_list, help="kernel truncations, e.g. 100,1000")
    parser.add_argument("--levels", type=_int_list, help="swept levels (n, K or M)")
    parser.add_argument("--indices", type=_int_list, help="tracked singular value indices")
    parser.add_argument("--fit-range", dest="fit_range", type=_int_list, help="decay fit range i_lo,i_hi")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="speclab", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--config", default="config.yaml", help="flat YAML settings file")
    parser.add_argument("--out", dest="output_dir", help=f"output directory (env {OUTPUT_DIR_ENV})")
    parser.add_argument("--seed", type=int, help="seed for random start vectors and trials")
    parser.add_argument("--weighting", choices=["paper", "l2"], help="quadrature weighting mode")
    parser.add_argument("--engine", choices=["auto", "dense", "lanczos"], help="spectrum engine")
    parser.add_argument("--full-scale", dest="full_scale", action="store_true", default=None,
                        help="allow sizes beyond the desk-scale guards")
    parser.add_argument("--no-cache", dest="use_cache", action="store_false", default=None,
                        help="ignore and do not update the result cache")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")

    commands = parser.add_subparsers(dest="command", required=True)
    for name in FIGURES:
        _size_options(commands.add_parser(name, help=f"reproduce {name}"))
    spectrum = commands.add_parser("spectrum", help="spectrum of a single operator")
    spectrum.add_argument("operator", choices=SPECTRUM_OPERATORS)
    _size_options(spectrum)
    check = commands.add_parser("check", help="bound reports")
    _size_options(check)
    check.add_argument("--trials", type=int, help="random product-inequality trials")
    commands.add_parser("clean-cache", help="delete cached results")
    return parser


def run(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    """Execute one parsed command; returns the exit status."""
    if args.command == "clean-cache":
        output_dir = args.output_dir or config["output_dir"]
        removed = ResultStore(output_dir).clean_cache()
        print(f"Removed {removed} cache entries from {output_dir}")
        return 0

    overrides = {key: value for key, value in vars(args).items()
                 if key not in ("command", "config", "verbose")}
    cfg = build_config(args.command, settings=config, overrides=overrides)
    result = run_experiment(cfg)
    print(format_result_summary(result.report))

    failed = [name for name, report in result.bounds.items() if not report.overall_satisfied]
    if failed:
        print(highlight(f"Bounds violated: {', '.join(failed)}", "red"))
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the spectral lab."""
    args = build_parser().parse_args(argv)
    config: Dict[str, Any] = dict(DEFAULTS)
    setup_logging("DEBUG" if args.verbose else "INFO")
    try:
        config = load_config(args.config)
        setup_logging("DEBUG" if args.verbose else str(config.get("log_level", "INFO")))
        return run(args, config)
    except (Exception, KeyboardInterrupt) as exc:
        reporter = ErrorReporter(config)
        if isinstance(exc, KeyboardInterrupt):
            payload = {"success": False, "type": "interrupted", "error": "Interrupted"}
        else:
            payload = reporter.to_payload(exc)
        sys.stderr.write(json.dumps(payload) + "\n")
        return reporter.exit_status(exc)


if __name__ == "__main__":
    sys.exit(main())
