"""Upper/lower envelopes of signal groups and the prototype-update skip tests.

Approximating a whole group in the uniform norm only depends on the pointwise
maximum and minimum of its members, so every solver works on an Envelope.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from chebproto.config import get_settings
from chebproto.errors import DimensionError, EmptyInputError, NotFoundError
from chebproto.models import Envelope, Grid, SignalGroup

logger = logging.getLogger(__name__)


def _extremes(samples: np.ndarray, ids: Sequence[str]) -> tuple[np.ndarray, np.ndarray, list[str], list[str]]:
    """Pointwise max/min with the smallest id winning ties."""
    order = sorted(range(len(ids)), key=lambda j: ids[j])
    ranked = samples[order]
    ranked_ids = [ids[j] for j in order]
    columns = np.arange(ranked.shape[1])
    top = np.argmax(ranked, axis=0)
    bottom = np.argmin(ranked, axis=0)
    return (
        ranked[top, columns],
        ranked[bottom, columns],
        [ranked_ids[j] for j in top],
        [ranked_ids[j] for j in bottom],
    )


def build_envelope(group: SignalGroup) -> Envelope:
    """Build S_max/S_min of a group with witness ids per grid point.

    Raises:
        EmptyInputError: If the group has no signals.
    """
    if group.is_empty:
        raise EmptyInputError("Cannot build an envelope of an empty signal group")
    upper, lower, upper_ids, lower_ids = _extremes(group.samples, group.ids)
    return Envelope(
        grid=group.grid,
        upper=upper,
        lower=lower,
        upper_witness=tuple(upper_ids),
        lower_witness=tuple(lower_ids),
    )


def classical_envelope(grid: Grid, values: Sequence[float] | np.ndarray) -> Envelope:
    """Zero-width envelope of a single curve (upper = lower)."""
    curve = np.asarray(values, dtype=float)
    return Envelope(grid=grid, upper=curve, lower=curve)


@dataclass(frozen=True)
class EnvelopeUpdate:
    """Result of an incremental envelope update."""

    envelope: Envelope
    group: SignalGroup
    changed: bool


def update_envelope(
    env: Envelope,
    group: SignalGroup,
    added: SignalGroup | None = None,
    removed: Sequence[str] = (),
) -> EnvelopeUpdate:
    """Envelope of the group after removing and adding signals.

    Points whose witness survives are updated against the added rows only;
    points whose witness was removed are recomputed from the remaining rows.

    Args:
        env: Envelope of `group`.
        group: Current member signals.
        added: New member signals (same grid).
        removed: Ids of members leaving the group.

    Returns:
        EnvelopeUpdate with the new envelope, the new group and whether either
        curve changed at any grid point.

    Raises:
        NotFoundError: If a removed id is not in the group.
        DimensionError: If added rows do not match the grid.
        EmptyInputError: If the update leaves the group empty.
    """
    for signal_id in removed:
        if signal_id not in group.ids:
            raise NotFoundError(f"Cannot remove unknown signal '{signal_id}'")
    if added is not None and len(added.grid) != len(group.grid):
        raise DimensionError(
            f"Added rows have {len(added.grid)} values, grid has {len(group.grid)}"
        )
    if not env.grid.same_as(group.grid):
        raise DimensionError("Envelope and group are on different grids")

    remaining = group.without(removed) if removed else group
    new_group = remaining
    if added is not None and not added.is_empty:
        new_group = remaining.with_rows(added.ids, added.samples)
    if new_group.is_empty:
        raise EmptyInputError("Update leaves the signal group empty")

    if env.upper_witness is None or env.lower_witness is None:
        fresh = build_envelope(new_group)
        return EnvelopeUpdate(fresh, new_group, _differs(env, fresh))

    upper = env.upper.copy()
    lower = env.lower.copy()
    upper_ids = list(env.upper_witness)
    lower_ids = list(env.lower_witness)

    gone = set(removed)
    stale = np.array(
        [upper_ids[i] in gone or lower_ids[i] in gone for i in range(len(upper))], dtype=bool
    )
    if stale.any() and not remaining.is_empty:
        columns = np.flatnonzero(stale)
        hi, lo, hi_ids, lo_ids = _extremes(remaining.samples[:, columns], remaining.ids)
        upper[columns] = hi
        lower[columns] = lo
        for k, i in enumerate(columns):
            upper_ids[i] = hi_ids[k]
            lower_ids[i] = lo_ids[k]
        logger.debug(f"Recomputed {columns.size} envelope points after witness removal")
    elif stale.any():
        # Everything left comes from `added`; seed from its first row
        first = added.samples[0]  # type: ignore[union-attr]
        columns = np.flatnonzero(stale)
        upper[columns] = first[columns]
        lower[columns] = first[columns]
        for i in columns:
            upper_ids[i] = added.ids[0]  # type: ignore[union-attr]
            lower_ids[i] = added.ids[0]  # type: ignore[union-attr]

    if added is not None:
        for signal_id, row in zip(added.ids, added.samples):
            for i in range(len(upper)):
                if row[i] > upper[i] or (row[i] == upper[i] and signal_id < upper_ids[i]):
                    upper[i] = row[i]
                    upper_ids[i] = signal_id
                if row[i] < lower[i] or (row[i] == lower[i] and signal_id < lower_ids[i]):
                    lower[i] = row[i]
                    lower_ids[i] = signal_id

    updated = Envelope(
        grid=env.grid,
        upper=upper,
        lower=lower,
        upper_witness=tuple(upper_ids),
        lower_witness=tuple(lower_ids),
    )
    return EnvelopeUpdate(updated, new_group, _differs(env, updated))


def _differs(old: Envelope, new: Envelope) -> bool:
    return not (np.array_equal(old.upper, new.upper) and np.array_equal(old.lower, new.lower))


@dataclass(frozen=True)
class LowerBound:
    """Half the widest envelope gap and the points attaining it."""

    delta_star: float
    witnesses: tuple[int, ...]


def lower_bound(env: Envelope, tolerance: float | None = None) -> LowerBound:
    """Delta* = 0.5 * max_i(upper[i] - lower[i]) and its maximal difference points."""
    tol = get_settings().tolerance if tolerance is None else tolerance
    half_gap = 0.5 * env.gap
    delta_star = float(half_gap.max())
    witnesses = np.flatnonzero(half_gap >= delta_star - tol)
    return LowerBound(delta_star, tuple(int(i) for i in witnesses))


def deviations(env: Envelope, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Upper deviation (upper - S) and lower deviation (S - lower) at every point."""
    values = np.asarray(values, dtype=float)
    if values.shape != env.upper.shape:
        raise DimensionError(
            f"Prototype has {values.size} values, envelope has {env.upper.size}"
        )
    return env.upper - values, values - env.lower


def no_update_needed(env: Envelope, values: np.ndarray, tolerance: float | None = None) -> bool:
    """True when some envelope gap equals twice the prototype's maximal deviation.

    The prototype is then already optimal for the envelope: no approximation
    can beat half the widest gap.
    """
    tol = get_settings().tolerance if tolerance is None else tolerance
    above, below = deviations(env, values)
    deviation = float(max(above.max(), below.max()))
    return bool(np.any(np.abs(env.gap - 2.0 * deviation) <= tol))
