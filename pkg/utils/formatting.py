"""
Formatting Utilities
JSON conversion and plain-text summaries of experiment results.
"""

from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Sequence
import json
import math

import numpy as np


def to_jsonable(value: Any) -> Any:
    """
    Convert results into plain JSON types.

    Objects with a to_dict method use it; numpy scalars and arrays become
    Python numbers and lists; non-finite floats become strings.
    """
    if hasattr(value, "to_dict") and callable(value.to_dict):
        return to_jsonable(value.to_dict())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if is_dataclass(value) and not isinstance(value, type):
        return to_jsonable(asdict(value))
    return value


def dumps(data: Any) -> str:
    """Pretty, key-sorted JSON."""
    return json.dumps(to_jsonable(data), indent=2, sort_keys=True)


def format_table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    """Fixed-width text table."""
    cells = [[_cell(v) for v in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        for col, text in enumerate(row):
            widths[col] = max(widths[col], len(text))
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)),
             "  ".join("-" * w for w in widths)]
    lines.extend("  ".join(text.ljust(w) for text, w in zip(row, widths)) for row in cells)
    return "\n".join(lines)


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, bool):
        return "yes" if value else "NO"
    return str(value)


def format_result_summary(report: Dict[str, Any]) -> str:
    """
    Human-readable summary of an experiment report.

    Args:
        report: Report dictionary as written to report.json

    Returns:
        Multi-line text for the console
    """
    output: List[str] = []
    output.append(f"EXPERIMENT: {report.get('experiment', 'unknown')}"
                  f"{' (cached)' if report.get('cached') else ''}")
    output.append(f"OUTPUT: {report.get('output_dir', '')}")
    output.append("=" * 80)

    spectra = report.get("spectra", {})
    if spectra:
        rows = []
        for name, info in spectra.items():
            values = info.get("leading", [])
            rows.append([name, f"{info['rows']}x{info['cols']}", info["method"], info["numerical_rank"],
                         values[0] if values else float("nan")])
        output.append("SPECTRA:")
        output.append(format_table(["name", "shape", "method", "rank", "sigma_1"], rows))

    fits = report.get("fits", {})
    if fits:
        rows = [[name, fit["preferred"] or "tie", fit["polynomial"]["rate"], fit["polynomial"]["r2"],
                 fit["exponential"]["rate"], fit["exponential"]["r2"]] for name, fit in fits.items()]
        output.append("\nDECAY FITS:")
        output.append(format_table(["name", "preferred", "p", "r2(poly)", "c", "r2(exp)"], rows))

    bounds = report.get("bounds", {})
    if bounds:
        rows = [[name, len(b["records"]), b["overall_satisfied"]] for name, b in bounds.items()]
        output.append("\nBOUNDS:")
        output.append(format_table(["bound", "indices", "satisfied"], rows))

    studies = report.get("studies", {})
    if studies:
        rows = []
        for name, study in studies.items():
            for index, ok in study["monotone"].items():
                rows.append([name, index, ok, study["limit_candidate"][index], study["relative_last_step"][index]])
        output.append("\nCONVERGENCE:")
        output.append(format_table(["study", "index", "monotone", "last", "rel.step"], rows))

    timings = report.get("timings", {})
    if timings:
        output.append("\nTIMINGS: " + ", ".join(f"{k}={v:.2f}s" for k, v in timings.items()))
    return "\n".join(output)
