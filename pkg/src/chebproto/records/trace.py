"""Per-grid-point trace CSVs for plotting envelopes against prototypes."""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Sequence

import numpy as np

from chebproto.envelope import deviations
from chebproto.models import Envelope

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["t", "S_max", "S_min", "prototype", "upper_dev", "lower_dev"]


def trace_rows(env: Envelope, values: np.ndarray | None, cluster: int | None = None) -> list[list]:
    """Rows of the trace table; prototype columns stay empty without values."""
    above, below = deviations(env, values) if values is not None else (None, None)
    rows: list[list] = []
    for i, t in enumerate(env.grid.points):
        row: list = [] if cluster is None else [cluster]
        row += [repr(float(t)), repr(float(env.upper[i])), repr(float(env.lower[i]))]
        if values is None:
            row += ["", "", ""]
        else:
            row += [repr(float(values[i])), repr(float(above[i])), repr(float(below[i]))]
        rows.append(row)
    return rows


def write_trace(
    path: Path,
    traces: Sequence[tuple[Envelope, np.ndarray | None]],
    *,
    with_cluster: bool = False,
) -> Path:
    """Write one block of rows per envelope; cluster runs get a leading cluster column."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow((["cluster"] if with_cluster else []) + TRACE_COLUMNS)
        for index, (env, values) in enumerate(traces):
            writer.writerows(trace_rows(env, values, index if with_cluster else None))
    logger.info(f"Wrote trace: {path}")
    return path
