"""CSV and JSON interchange.

CSV holds all numeric data: one column for a univariate series, columns
as series (rows as time) for multivariate data and ensembles. Values
are written with 17 significant digits so doubles round-trip exactly;
readers accept an optional header row, comma separators, and LF or
CRLF endings. JSON carries model summaries.
"""

from __future__ import annotations

import json

import numpy as np

from .signal import TimeSeries

__all__ = [
    "CsvParseError",
    "read_series",
    "write_series",
    "read_columns",
    "write_columns",
    "write_json",
]


class CsvParseError(ValueError):
    """Malformed CSV cell, carrying its 1-based line and column."""

    def __init__(self, path, line: int, column: int, cell: str):
        self.path = path
        self.line = line
        self.column = column
        super().__init__(f"{path}: non-numeric cell {cell!r} at line {line}, column {column}")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_rows(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        text = fh.read()
    rows = []
    width = None
    for line_no, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        cells = [c.strip() for c in line.split(",")]
        if line_no == 1:
            # header heuristic: skip the first row if any cell is non-numeric
            try:
                rows.append([float(c) for c in cells])
                width = len(cells)
            except ValueError:
                continue
            continue
        if width is None:
            width = len(cells)
        if len(cells) != width:
            raise CsvParseError(path, line_no, len(cells), raw)
        parsed = []
        for col_no, cell in enumerate(cells, start=1):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise CsvParseError(path, line_no, col_no, cell) from None
        rows.append(parsed)
    if not rows:
        raise CsvParseError(path, 1, 1, "<empty file>")
    return np.asarray(rows, dtype=np.float64)


def read_series(path) -> TimeSeries:
    """Read a univariate series (single numeric column)."""
    data = _parse_rows(path)
    if data.shape[1] != 1:
        raise CsvParseError(path, 1, data.shape[1], "<expected a single column>")
    return TimeSeries(data[:, 0])


def write_series(path, series: TimeSeries, header: str | None = None) -> None:
    """Write a univariate series, one sample per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            fh.write(header + "\n")
        for v in series.values:
            fh.write(_fmt(v) + "\n")


def read_columns(path) -> np.ndarray:
    """Read a multivariate file: columns are series, rows are time."""
    return _parse_rows(path)


def write_columns(path, columns: np.ndarray, header: str | None = None) -> None:
    """Write a (time x series) array as CSV columns."""
    columns = np.atleast_2d(np.asarray(columns, dtype=np.float64))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            fh.write(header + "\n")
        for row in columns:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path, payload: dict) -> None:
    """Write a JSON summary deterministically (sorted keys, repr floats)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def complex_pairs(values: np.ndarray) -> list:
    """Complex array as JSON-friendly [real, imag] pairs."""
    return [[float(v.real), float(v.imag)] for v in np.asarray(values)]
