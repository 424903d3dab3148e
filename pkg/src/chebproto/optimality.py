"""Optimality certificates for two-curve (and single-curve) minimax prototypes.

A prototype is optimal when either some grid point attains the maximal
deviation against both curves (a double point), or n+2 increasing points
attain it with strictly alternating sides. Equivalently, zero lies in the
convex hull of the active gradients +g(t) (upper side) and -g(t) (lower side).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from chebproto.basis import ChebyshevBasis, evaluate_on_grid
from chebproto.config import get_settings
from chebproto.envelope import deviations
from chebproto.errors import DomainError
from chebproto.models import Envelope, Grid
from chebproto.solvers.lp import feasibility_in_convex_hull

logger = logging.getLogger(__name__)

VerdictReason = Literal["double-point", "alternating-sequence", "subdifferential", "not-optimal"]


@dataclass(frozen=True, eq=False)
class DeviationProfile:
    """Pointwise deviations of a prototype and the points attaining the maximum.

    Attributes:
        upper_deviation: upper - S(A, t) per grid point.
        lower_deviation: S(A, t) - lower per grid point.
        delta: Maximum over both deviation sequences.
        t_plus: Indices where the upper deviation attains delta.
        t_minus: Indices where the lower deviation attains delta.
        tolerance: Membership tolerance used for t_plus/t_minus.
    """

    upper_deviation: np.ndarray
    lower_deviation: np.ndarray
    delta: float
    t_plus: tuple[int, ...]
    t_minus: tuple[int, ...]
    tolerance: float

    def active(self) -> list[tuple[int, int]]:
        """Active (index, sign) pairs in increasing index order, + before -."""
        pairs = [(i, 1) for i in self.t_plus] + [(i, -1) for i in self.t_minus]
        return sorted(pairs, key=lambda pair: (pair[0], -pair[1]))


@dataclass(frozen=True)
class OptimalityVerdict:
    """Outcome of an optimality check.

    Exactly one certificate field is filled for an optimal verdict: the
    double point, the alternating sequence, or the convex weights (with the
    active pairs they belong to). Not-optimal subdifferential verdicts carry
    an improving direction for the coefficients.
    """

    optimal: bool
    reason: VerdictReason
    delta: float
    double_point: int | None = None
    sequence: tuple[tuple[int, int], ...] | None = None
    weights: tuple[float, ...] | None = None
    support: tuple[tuple[int, int], ...] | None = None
    direction: tuple[float, ...] | None = None

    def to_dict(self) -> dict:
        data: dict = {"optimal": self.optimal, "reason": self.reason, "delta": self.delta}
        if self.double_point is not None:
            data["double_point"] = self.double_point
        if self.sequence is not None:
            data["sequence"] = [{"index": i, "sign": s} for i, s in self.sequence]
        if self.weights is not None and self.support is not None:
            data["weights"] = [
                {"index": i, "sign": s, "weight": w} for (i, s), w in zip(self.support, self.weights)
            ]
        if self.direction is not None:
            data["direction"] = list(self.direction)
        return data


def deviation_profile(
    env: Envelope,
    basis: ChebyshevBasis,
    coeffs: Sequence[float] | np.ndarray,
    *,
    tolerance: float | None = None,
) -> DeviationProfile:
    """Compute deviations and the maximal deviation sets T+ and T-.

    A deviation counts as attaining delta when it is within
    tolerance * max(1, delta) of it.

    Raises:
        DimensionError: If the coefficients or basis do not match the envelope.
    """
    tol = get_settings().tolerance if tolerance is None else tolerance
    above, below = deviations(env, evaluate_on_grid(basis, coeffs, env.grid))
    delta = float(max(above.max(), below.max()))
    membership = tol * max(1.0, abs(delta))
    return DeviationProfile(
        upper_deviation=above,
        lower_deviation=below,
        delta=delta,
        t_plus=tuple(int(i) for i in np.flatnonzero(above >= delta - membership)),
        t_minus=tuple(int(i) for i in np.flatnonzero(below >= delta - membership)),
        tolerance=membership,
    )


def _alternating_run(events: Sequence[tuple[int, int]], start: int) -> list[tuple[int, int]]:
    sequence: list[tuple[int, int]] = []
    wanted = start
    for index, sign in events:
        if sign == wanted:
            sequence.append((index, sign))
            wanted = -wanted
    return sequence


def check_alternation(profile: DeviationProfile, n: int) -> OptimalityVerdict:
    """Double point, else n+2 strictly alternating maximal deviation points.

    The alternating search is a greedy left-to-right scan taking the earliest
    index that extends the pattern, tried from both starting signs.
    """
    double = sorted(set(profile.t_plus) & set(profile.t_minus))
    if double:
        return OptimalityVerdict(True, "double-point", profile.delta, double_point=double[0])

    events = profile.active()
    for start in (1, -1):
        sequence = _alternating_run(events, start)
        if len(sequence) >= n + 2:
            return OptimalityVerdict(
                True,
                "alternating-sequence",
                profile.delta,
                sequence=tuple(sequence[: n + 2]),
            )
    return OptimalityVerdict(False, "not-optimal", profile.delta)


def check_subdifferential(
    profile: DeviationProfile,
    basis: ChebyshevBasis,
    grid: Grid,
) -> OptimalityVerdict:
    """Decide whether 0 lies in the convex hull of the active gradients.

    Columns are +g(t) for t in T+ and -g(t) for t in T-. When feasible, the
    basic solution has at most n+2 positive weights and those form the
    certificate; otherwise the separating direction is returned.
    """
    design = basis.matrix(grid)
    active = profile.active()
    columns = np.column_stack([sign * design[index] for index, sign in active])
    hull = feasibility_in_convex_hull(columns)
    if hull.feasible:
        keep = np.flatnonzero(hull.weights > 0)
        return OptimalityVerdict(
            True,
            "subdifferential",
            profile.delta,
            weights=tuple(float(w) for w in hull.weights[keep]),
            support=tuple(active[k] for k in keep),
        )
    assert hull.direction is not None
    return OptimalityVerdict(
        False,
        "not-optimal",
        profile.delta,
        direction=tuple(float(h) for h in hull.direction),
    )


def check_classical(
    env: Envelope,
    basis: ChebyshevBasis,
    coeffs: Sequence[float] | np.ndarray,
    *,
    tolerance: float | None = None,
) -> OptimalityVerdict:
    """Single-curve alternation check (upper and lower curves coincide).

    Raises:
        DomainError: If the envelope has nonzero width anywhere.
    """
    if not np.array_equal(env.upper, env.lower):
        raise DomainError("Classical check needs upper = lower at every grid point")
    profile = deviation_profile(env, basis, coeffs, tolerance=tolerance)
    return check_alternation(profile, basis.degree)
