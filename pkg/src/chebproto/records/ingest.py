"""Read signal groups from CSV files.

Two layouts are supported:
- wide: the first row holds the grid times (after a leading label cell), every
  following row is `id, v_1, ..., v_N`
- long: one `id, t, value` triple per row, optionally under a header; the grid
  is the sorted union of all times and every signal must cover all of it
"""

from __future__ import annotations

import csv
import logging
import math
from pathlib import Path
from typing import Iterator, Literal

import numpy as np

from chebproto.errors import ChebprotoError, CsvParseError
from chebproto.models import Grid, SignalGroup

logger = logging.getLogger(__name__)

Layout = Literal["wide", "long"]


def _rows(path: Path) -> Iterator[tuple[int, list[str]]]:
    """Non-blank rows with their 1-based line numbers."""
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        for row in reader:
            cells = [cell.strip() for cell in row]
            if not any(cells):
                continue
            yield reader.line_num, cells


def _number(text: str, line: int, signal_id: str | None = None, time: float | None = None) -> float:
    try:
        value = float(text)
    except ValueError:
        raise CsvParseError(f"Not a number: '{text}'", line, signal_id, time) from None
    if not math.isfinite(value):
        raise CsvParseError(f"Non-finite value '{text}'", line, signal_id, time)
    return value


def _grid(times: list[float], line: int | None) -> Grid:
    try:
        return Grid.from_points(times)
    except ChebprotoError as e:
        raise CsvParseError(f"Invalid grid: {e}", line) from e


def _read_wide(path: Path) -> SignalGroup:
    rows = list(_rows(path))
    if not rows:
        raise CsvParseError("File has no header row", 1)
    header_line, header = rows[0]
    if len(header) < 2:
        raise CsvParseError("Header needs a label cell followed by at least one time", header_line)
    times = [_number(cell, header_line) for cell in header[1:]]
    grid = _grid(times, header_line)

    ids: list[str] = []
    values: list[list[float]] = []
    for line, cells in rows[1:]:
        signal_id = cells[0]
        if not signal_id:
            raise CsvParseError("Missing signal id", line)
        if len(cells) != len(header):
            raise CsvParseError(
                f"Row has {len(cells) - 1} values, header has {len(times)} times", line, signal_id
            )
        if signal_id in ids:
            raise CsvParseError("Duplicate signal id", line, signal_id)
        ids.append(signal_id)
        values.append(
            [_number(cell, line, signal_id, t) for cell, t in zip(cells[1:], times)]
        )
    if not ids:
        raise CsvParseError("File has no signal rows", header_line)
    return SignalGroup.from_rows(grid, np.array(values), ids)


def _read_long(path: Path) -> SignalGroup:
    cells_by_id: dict[str, dict[float, float]] = {}
    first_line: int | None = None
    for line, cells in _rows(path):
        if len(cells) != 3:
            raise CsvParseError(f"Expected 3 columns (id, t, value), got {len(cells)}", line)
        if first_line is None:
            first_line = line
            try:
                float(cells[1])
            except ValueError:
                logger.debug(f"Treating line {line} as a header")
                continue
        signal_id = cells[0]
        if not signal_id:
            raise CsvParseError("Missing signal id", line)
        t = _number(cells[1], line, signal_id)
        value = _number(cells[2], line, signal_id, t)
        series = cells_by_id.setdefault(signal_id, {})
        if t in series:
            raise CsvParseError("Duplicate (id, t) pair", line, signal_id, t)
        series[t] = value

    if not cells_by_id:
        raise CsvParseError("File has no signal rows", first_line)
    times = sorted({t for series in cells_by_id.values() for t in series})
    grid = _grid(times, None)
    values: list[list[float]] = []
    for signal_id, series in cells_by_id.items():
        for t in times:
            if t not in series:
                raise CsvParseError("Signal does not cover the grid", None, signal_id, t)
        values.append([series[t] for t in times])
    return SignalGroup.from_rows(grid, np.array(values), list(cells_by_id))


def ingest_csv(path: Path | str, layout: Layout = "wide") -> SignalGroup:
    """Read a signal group from a CSV file.

    Args:
        path: CSV file to read.
        layout: "wide" or "long".

    Returns:
        SignalGroup with signals in file order.

    Raises:
        CsvParseError: On ragged rows, non-numeric or non-finite values,
            duplicate ids or (id, t) pairs, an invalid grid or missing coverage.
        FileNotFoundError: If the file does not exist.
    """
    path = Path(path)
    if layout == "wide":
        group = _read_wide(path)
    elif layout == "long":
        group = _read_long(path)
    else:
        raise ValueError(f"Unknown layout '{layout}'. Available: wide, long")
    logger.info(f"Read {len(group)} signals on {len(group.grid)} grid points from {path}")
    return group
