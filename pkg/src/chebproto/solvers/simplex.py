"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Solves min c^T x subject to A x = b, x >= 0. The tableau carries both the
phase-two cost row and the phase-one (sum of artificials) row so that phase
two starts from the phase-one basis without rebuilding anything:

    [[A  | I | b],
     [c  | 0 | 0],
     [c' | 0 | -sum(b)]]

The right-hand column of a cost row holds minus the current objective value.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

logger = logging.getLogger(__name__)

SimplexStatus = Literal["optimal", "infeasible", "unbounded", "iteration-limit"]


@dataclass
class SimplexResult:
    """Outcome of a standard-form solve.

    Attributes:
        status: Final solver status.
        x: Values of the structural variables (artificials dropped).
        basis: Column index basic in each constraint row.
        objective: c^T x at the returned point.
        iterations: Number of pivots over both phases.
        multipliers: Simplex multipliers of the equality rows (the LP dual
            solution in phase two, the Farkas vector after phase one).
        phase_one_objective: Sum of artificials left after phase one.
    """

    status: SimplexStatus
    x: np.ndarray
    basis: np.ndarray
    objective: float
    iterations: int
    multipliers: np.ndarray
    phase_one_objective: float


def _pivot_col(costs: np.ndarray, allowed: int, tol: float) -> int | None:
    """Bland: the first column with a negative reduced cost."""
    candidates = np.flatnonzero(costs[:allowed] < -tol)
    if candidates.size == 0:
        return None
    return int(candidates[0])


def _pivot_row(T: np.ndarray, basis: np.ndarray, col: int, rows: int, tol: float) -> int | None:
    """Minimum ratio test; ties go to the row whose basic variable has the lowest index."""
    column = T[:rows, col]
    eligible = np.flatnonzero(column > tol)
    if eligible.size == 0:
        return None
    ratios = T[eligible, -1] / column[eligible]
    best = ratios.min()
    ties = eligible[ratios <= best + 1e-12 * max(1.0, abs(best))]
    return int(ties[np.argmin(basis[ties])])


def _apply_pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    basis[row] = col
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])


def solve_standard_form(
    A: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    *,
    max_iter: int,
    pivot_tolerance: float = 1e-10,
    feasibility_tolerance: float = 1e-9,
    phase_one_only: bool = False,
) -> SimplexResult:
    """Solve min c^T x s.t. A x = b, x >= 0 with the two-phase method.

    Artificial variables never re-enter once they leave. After phase one any
    artificial still basic at zero is pivoted out when its row has a usable
    structural entry; rows without one are redundant and keep the artificial.

    Args:
        A: (m, n) equality matrix.
        b: Right-hand sides, any sign.
        c: Cost vector of length n.
        max_iter: Pivot budget over both phases.
        pivot_tolerance: Entries at or below this are never pivoted on.
        feasibility_tolerance: Phase-one objective above this means infeasible.
        phase_one_only: Stop after phase one (pure feasibility problems).

    Returns:
        SimplexResult. Infeasibility, unboundedness and the iteration limit
        are statuses, not exceptions.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.array(c, dtype=float)
    m, n = A.shape

    row_signs = np.where(b < 0, -1.0, 1.0)
    A *= row_signs[:, None]
    b *= row_signs

    T = np.zeros((m + 2, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = c
    T[m + 1, :n] = -A.sum(axis=0)
    T[m + 1, -1] = -b.sum()
    basis = np.arange(n, n + m)

    iterations = 0

    def run(cost_row: int) -> SimplexStatus:
        nonlocal iterations
        while True:
            col = _pivot_col(T[cost_row], n, pivot_tolerance)
            if col is None:
                return "optimal"
            row = _pivot_row(T, basis, col, m, pivot_tolerance)
            if row is None:
                return "unbounded"
            if iterations >= max_iter:
                return "iteration-limit"
            _apply_pivot(T, basis, row, col)
            iterations += 1

    def multipliers(cost_row: int, artificial_cost: float) -> np.ndarray:
        return row_signs * (artificial_cost - T[cost_row, n : n + m])

    def result(status: SimplexStatus, cost_row: int, artificial_cost: float) -> SimplexResult:
        values = np.zeros(n + m)
        values[basis] = T[:m, -1]
        x = values[:n]
        return SimplexResult(
            status=status,
            x=x,
            basis=basis.copy(),
            objective=float(c @ x),
            iterations=iterations,
            multipliers=multipliers(cost_row, artificial_cost),
            phase_one_objective=float(-T[m + 1, -1]),
        )

    status = run(m + 1)
    phase_one = float(-T[m + 1, -1])
    logger.debug(f"Phase one finished after {iterations} pivots, infeasibility {phase_one:.3e}")
    if status == "iteration-limit":
        return result(status, m + 1, 1.0)
    if phase_one > feasibility_tolerance * max(1.0, float(np.abs(b).max(initial=0.0))):
        return result("infeasible", m + 1, 1.0)
    if phase_one_only:
        return result("optimal", m + 1, 1.0)

    for row in np.flatnonzero(basis >= n):
        usable = np.flatnonzero(np.abs(T[row, :n]) > pivot_tolerance)
        if usable.size:
            _apply_pivot(T, basis, int(row), int(usable[0]))

    status = run(m)
    logger.debug(f"Phase two finished with status {status} after {iterations} pivots")
    return result(status, m, 0.0)
