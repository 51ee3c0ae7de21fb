"""Deterministic delimited output, key=value summaries, and figures.

CSV files use the RFC-4180 dialect with '.' decimal separator and 17
significant digits, so every float round-trips bit-faithfully and
reruns produce byte-identical files.  Figures are rendered headlessly
to PNG next to the delimited output; they are a convenience view and
carry no data of their own.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "format_value",
    "write_csv",
    "write_summary",
    "read_csv_columns",
    "line_figure",
]


def format_value(value: object) -> str:
    """Canonical text for one CSV or summary cell."""
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path: str | Path, header: Sequence[str],
              rows: Iterable[Sequence[object]]) -> Path:
    """Write rows under a header; floats at 17 significant digits."""
    path = Path(path)
    with open(path, "w", newline="", encoding="ascii") as handle:
        writer = csv.writer(handle, lineterminator="\r\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([format_value(cell) for cell in row])
    return path


def write_summary(path: str | Path, entries: Mapping[str, object]) -> Path:
    """Write ``key = value`` lines in the mapping's iteration order."""
    path = Path(path)
    lines = [f"{key} = {format_value(value)}" for key, value in entries.items()]
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def read_csv_columns(path: str | Path) -> dict[str, list[str]]:
    """Read a CSV written by write_csv back into per-column string lists."""
    with open(path, newline="", encoding="ascii") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        columns: dict[str, list[str]] = {name: [] for name in header}
        for row in reader:
            for name, cell in zip(header, row):
                columns[name].append(cell)
    return columns


def line_figure(path: str | Path, x: Sequence[float],
                series: Mapping[str, Sequence[float]], xlabel: str, ylabel: str,
                title: str, logx: bool = False, logy: bool = False,
                x_per_series: Mapping[str, Sequence[float]] | None = None) -> Path:
    """Render a labeled line plot to PNG.

    Every series shares ``x`` unless ``x_per_series`` supplies its own
    abscissa for a label.  Log axes skip nonpositive values by way of
    matplotlib's masking, so callers can pass raw data.
    """
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, values in series.items():
        abscissa = x if x_per_series is None or label not in x_per_series \
            else x_per_series[label]
        ax.plot(abscissa, values, marker="o", markersize=3, linewidth=1.0,
                label=label)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if len(series) > 1:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
