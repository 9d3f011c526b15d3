"""
Result Emission
CSV, JSON and plot-script writers. Floats are written with 17 significant
digits and LF line endings so reruns produce identical bytes.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union
import csv
import logging
import pprint

import numpy as np

from spectra.spectrum import Spectrum
from utils.errors import InvalidArgumentError, OutputError
from utils.formatting import dumps

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SPECTRUM_HEADER = ("index", "sigma")
SWEEP_HEADER = ("level", "index", "sigma")


def format_float(value: float) -> str:
    return "%.17g" % float(value)


def _format_cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format_float(value)


def _write_text(path: PathLike, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise OutputError(str(path), f"Cannot write {path}: {e.strerror or e}") from e
    logger.debug(f"Wrote {path}")
    return path


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_format_cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def emit_spectrum_csv(spectrum: Union[Spectrum, Sequence[float], np.ndarray], path: PathLike) -> Path:
    """
    Write `index,sigma` rows for a spectrum (or plain values).

    Args:
        spectrum: Spectrum or descending values
        path: Target CSV file

    Returns:
        Path written
    """
    values = spectrum.values if isinstance(spectrum, Spectrum) else np.asarray(spectrum, dtype=np.float64)
    rows = ((i, float(v)) for i, v in enumerate(values, start=1))
    return _write_text(path, _csv_text(SPECTRUM_HEADER, rows))


def emit_sweep_csv(rows: Iterable[Tuple[int, int, float]], path: PathLike) -> Path:
    """Write `level,index,sigma` rows (see ConvergenceStudy.rows)."""
    return _write_text(path, _csv_text(SWEEP_HEADER, rows))


def emit_table_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], path: PathLike) -> Path:
    """Write a CSV with an arbitrary header, e.g. `n,rho`."""
    if not header:
        raise InvalidArgumentError("CSV header must not be empty")
    return _write_text(path, _csv_text(header, rows))


def read_spectrum_csv(path: PathLike) -> np.ndarray:
    """Parse an `index,sigma` CSV back into values."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if tuple(header or ()) != SPECTRUM_HEADER:
                raise InvalidArgumentError(f"{path} is not a spectrum CSV (header {header!r})")
            values = []
            for expected, row in enumerate(reader, start=1):
                try:
                    index, sigma = int(row[0]), float(row[1])
                except (IndexError, ValueError) as e:
                    raise InvalidArgumentError(f"{path}: malformed row {expected}: {row!r}") from e
                if index != expected:
                    raise InvalidArgumentError(f"{path}: row {expected} has index {row[0]}")
                values.append(sigma)
    except OSError as e:
        raise OutputError(str(path), f"Cannot read {path}: {e.strerror or e}") from e
    return np.array(values, dtype=np.float64)


def emit_json_report(report: Any, path: PathLike) -> Path:
    """Write a report as indented, key-sorted JSON."""
    return _write_text(path, dumps(report) + "\n")


@dataclass(frozen=True)
class SeriesSpec:
    """
    One plotted series read from a CSV file.

    x and y name CSV columns; with group set, one line is drawn per
    distinct value of that column (e.g. one line per index of a sweep).
    """

    file: str
    label: str
    x: str = "index"
    y: str = "sigma"
    group: Optional[str] = None
    style: str = "-"


@dataclass(frozen=True)
class PlotSpec:
    title: str
    xlabel: str
    ylabel: str
    xscale: str = "linear"
    yscale: str = "log"
    series: List[SeriesSpec] = field(default_factory=list)


_PLOT_TEMPLATE = '''"""
{title}

Generated plotting script; reads the CSV files next to it and writes
{image}. Requires matplotlib.
"""

import csv
import os

import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))

SERIES = {series}


def read_columns(name):
    with open(os.path.join(HERE, name), newline="") as f:
        rows = list(csv.DictReader(f))
    return {{key: [float(row[key]) for row in rows] for key in rows[0]}} if rows else {{}}


def positive(xs, ys):
    pairs = [(x, y) for x, y in zip(xs, ys) if y > 0]
    return [p[0] for p in pairs], [p[1] for p in pairs]


def main():
    fig, ax = plt.subplots(figsize=(7, 5))
    for series in SERIES:
        columns = read_columns(series["file"])
        if not columns:
            continue
        xs, ys = columns[series["x"]], columns[series["y"]]
        if series["group"] is None:
            ax.plot(*positive(xs, ys), series["style"], label=series["label"])
            continue
        groups = columns[series["group"]]
        for value in sorted(set(groups)):
            gx = [x for x, g in zip(xs, groups) if g == value]
            gy = [y for y, g in zip(ys, groups) if g == value]
            ax.plot(*positive(gx, gy), series["style"], label=f"{{series['label']}} {{series['group']}}={{value:g}}")
    ax.set_xscale({xscale!r})
    ax.set_yscale({yscale!r})
    ax.set_xlabel({xlabel!r})
    ax.set_ylabel({ylabel!r})
    ax.set_title({title!r})
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, {image!r}), dpi=150)


if __name__ == "__main__":
    main()
'''


def emit_plot_script(plot: PlotSpec, path: PathLike, image: Optional[str] = None) -> Path:
    """
    Write a self-contained matplotlib script for a plot specification.

    Args:
        plot: PlotSpec naming the CSV series and axis conventions
        path: Target .py file
        image: PNG name written by the script, default <script stem>.png

    Returns:
        Path written
    """
    if not plot.series:
        raise InvalidArgumentError("A plot needs at least one series")
    path = Path(path)
    series = [
        {"file": s.file, "label": s.label, "x": s.x, "y": s.y, "group": s.group, "style": s.style}
        for s in plot.series
    ]
    text = _PLOT_TEMPLATE.format(
        title=plot.title,
        image=image or f"{path.stem}.png",
        series=pprint.pformat(series, sort_dicts=False, width=100),
        xscale=plot.xscale,
        yscale=plot.yscale,
        xlabel=plot.xlabel,
        ylabel=plot.ylabel,
    )
    return _write_text(path, text)
