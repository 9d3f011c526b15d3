"""Results module: CSV/JSON/plot emission and the cached, locked result store."""

from .emit import (
    SeriesSpec,
    PlotSpec,
    emit_spectrum_csv,
    emit_sweep_csv,
    emit_table_csv,
    emit_json_report,
    emit_plot_script,
    read_spectrum_csv,
)
from .store import ResultStore, file_sha256

__all__ = [
    "SeriesSpec",
    "PlotSpec",
    "emit_spectrum_csv",
    "emit_sweep_csv",
    "emit_table_csv",
    "emit_json_report",
    "emit_plot_script",
    "read_spectrum_csv",
    "ResultStore",
    "file_sha256",
]
