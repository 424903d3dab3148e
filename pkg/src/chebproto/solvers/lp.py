"""Linear-programming reduction of the two-curve minimax problem.

    minimize    z
    subject to  upper[i] - S(A, t_i) <= z
                S(A, t_i) - lower[i] <= z        i = 0..N-1

with A = (a_0..a_n) and z free: n+2 variables and 2N constraints.

The LP has few columns and many rows, so solve_simplex runs the dense
two-phase simplex on its dual, whose tableau has n+2 rows. The primal point is
read off the dual's simplex multipliers and the dual values are the convex
weights of the optimality certificate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from chebproto.basis import ChebyshevBasis
from chebproto.config import get_settings
from chebproto.errors import DimensionError
from chebproto.models import Envelope, Side
from chebproto.solvers.simplex import SimplexStatus, solve_standard_form

logger = logging.getLogger(__name__)

LpStatus = Literal["optimal", "infeasible", "unbounded", "iteration-limit"]
RowLabel = tuple[int, Side]

FEASIBILITY_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class LpProblem:
    """min c^T x subject to matrix @ x <= rhs.

    Attributes:
        objective: Cost vector c.
        matrix: Dense constraint matrix; every row is a <= relation.
        rhs: Right-hand sides.
        free: Per-variable flag; False means x_j >= 0.
        labels: Origin of each row as (grid index, side).
        column_names: Variable names, in column order.
    """

    objective: np.ndarray
    matrix: np.ndarray
    rhs: np.ndarray
    free: np.ndarray
    labels: tuple[RowLabel, ...] = ()
    column_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        rows, cols = np.shape(self.matrix)
        if np.size(self.objective) != cols or np.size(self.free) != cols:
            raise DimensionError(f"LP has {cols} columns but objective/bounds disagree")
        if np.size(self.rhs) != rows:
            raise DimensionError(f"LP has {rows} rows but {np.size(self.rhs)} right-hand sides")
        if self.labels and len(self.labels) != rows:
            raise DimensionError(f"{len(self.labels)} row labels for {rows} rows")

    @property
    def shape(self) -> tuple[int, int]:
        rows, cols = np.shape(self.matrix)
        return int(rows), int(cols)


@dataclass
class LpSolution:
    """Result of solve_simplex.

    Attributes:
        status: optimal, infeasible, unbounded or iteration-limit.
        x: Variable values (for build_lp problems: a_0..a_n then z).
        objective: c^T x.
        active_rows: Constraint rows in the final basis.
        duals: Nonnegative multipliers of every constraint row.
        iterations: Simplex pivots performed.
    """

    status: LpStatus
    x: np.ndarray
    objective: float
    active_rows: tuple[int, ...]
    duals: np.ndarray
    iterations: int
    max_violation: float = field(default=0.0)

    @property
    def coeffs(self) -> np.ndarray:
        return self.x[:-1]

    @property
    def z(self) -> float:
        return float(self.x[-1])


def build_lp(env: Envelope, basis: ChebyshevBasis) -> LpProblem:
    """Build the minimax LP for an envelope.

    Rows 0..N-1 are the upper constraints -S(A, t_i) - z <= -upper[i];
    rows N..2N-1 are the lower constraints S(A, t_i) - z <= lower[i].

    Raises:
        DimensionError: If a custom basis lives on a different grid.
    """
    design = basis.matrix(env.grid)
    size = len(env.grid)
    ones = np.ones((size, 1))
    matrix = np.vstack([np.hstack([-design, -ones]), np.hstack([design, -ones])])
    rhs = np.concatenate([-env.upper, env.lower])
    objective = np.zeros(basis.dimension + 1)
    objective[-1] = 1.0
    labels: list[RowLabel] = [(i, "upper") for i in range(size)]
    labels += [(i, "lower") for i in range(size)]
    return LpProblem(
        objective=objective,
        matrix=matrix,
        rhs=rhs,
        free=np.ones(basis.dimension + 1, dtype=bool),
        labels=tuple(labels),
        column_names=tuple(f"A{i}" for i in range(basis.dimension)) + ("Z",),
    )


_DUAL_STATUS: dict[SimplexStatus, LpStatus] = {
    "optimal": "optimal",
    "infeasible": "unbounded",
    "unbounded": "infeasible",
    "iteration-limit": "iteration-limit",
}


def solve_simplex(
    problem: LpProblem,
    limit: int | None = None,
    *,
    pivot_tolerance: float | None = None,
) -> LpSolution:
    """Solve an LpProblem with the dense two-phase simplex (Bland's rule).

    The dual  min rhs^T y  s.t.  matrix[:, j]^T y = -c_j (free j),
    matrix[:, j]^T y - mu_j = -c_j (nonnegative j),  y, mu >= 0  is solved in
    standard form; the primal optimum is minus its value. The returned `x`
    is read off the dual tableau's simplex multipliers, and `duals` are the
    dual solution y itself.

    Args:
        problem: LP to solve.
        limit: Pivot budget (defaults to settings.lp_max_iter).
        pivot_tolerance: Pivot threshold (defaults to settings).

    Returns:
        LpSolution; an exceeded limit is reported as status iteration-limit.
    """
    settings = get_settings()
    max_iter = settings.lp_max_iter if limit is None else limit
    piv_tol = settings.pivot_tolerance if pivot_tolerance is None else pivot_tolerance

    rows, cols = problem.shape
    bounded = np.flatnonzero(~np.asarray(problem.free, dtype=bool))
    slack = np.zeros((cols, bounded.size))
    slack[bounded, np.arange(bounded.size)] = -1.0
    dual_matrix = np.hstack([problem.matrix.T, slack])
    dual_cost = np.concatenate([problem.rhs, np.zeros(bounded.size)])

    result = solve_standard_form(
        dual_matrix,
        -np.asarray(problem.objective, dtype=float),
        dual_cost,
        max_iter=max_iter,
        pivot_tolerance=piv_tol,
    )
    status = _DUAL_STATUS[result.status]
    x = result.multipliers
    duals = result.x[:rows].copy()
    violation = float(np.max(problem.matrix @ x - problem.rhs, initial=0.0))
    scale = max(1.0, float(np.abs(problem.rhs).max(initial=0.0)))
    if status == "optimal" and violation > FEASIBILITY_TOLERANCE * scale:
        logger.warning(f"LP optimum violates a constraint by {violation:.3e}")
    active = tuple(int(j) for j in np.sort(result.basis) if j < rows)
    solution = LpSolution(
        status=status,
        x=x,
        objective=float(np.asarray(problem.objective) @ x),
        active_rows=active,
        duals=duals,
        iterations=result.iterations,
        max_violation=violation,
    )
    logger.debug(
        f"LP {rows}x{cols}: {status} objective={solution.objective!r} after {result.iterations} pivots"
    )
    return solution


@dataclass
class HullResult:
    """Whether the origin is a convex combination of a set of columns.

    Attributes:
        feasible: True when weights were found.
        weights: Lambda >= 0 with sum 1 and M @ Lambda = 0 (zeros when infeasible).
        direction: When infeasible, h with M[:, j] . h > 0 for every column.
        iterations: Phase-one pivots.
    """

    feasible: bool
    weights: np.ndarray
    direction: np.ndarray | None
    iterations: int


def feasibility_in_convex_hull(
    columns: np.ndarray | Sequence[Sequence[float]],
    *,
    limit: int | None = None,
    pivot_tolerance: float | None = None,
) -> HullResult:
    """Decide whether 0 is in the convex hull of the columns of a d x m matrix.

    Runs phase one on [M; 1^T] Lambda = [0; 1], Lambda >= 0. The basic
    solution returned has at most d+1 positive weights.
    """
    settings = get_settings()
    M = np.asarray(columns, dtype=float)
    if M.ndim == 1:
        M = M.reshape(1, -1)
    d, m = M.shape
    if m < 1:
        raise DimensionError("Convex hull test needs at least one column")

    system = np.vstack([M, np.ones((1, m))])
    rhs = np.zeros(d + 1)
    rhs[-1] = 1.0
    result = solve_standard_form(
        system,
        rhs,
        np.zeros(m),
        max_iter=settings.lp_max_iter if limit is None else limit,
        pivot_tolerance=settings.pivot_tolerance if pivot_tolerance is None else pivot_tolerance,
        feasibility_tolerance=FEASIBILITY_TOLERANCE,
        phase_one_only=True,
    )
    if result.status == "optimal":
        weights = np.clip(result.x, 0.0, None)
        weights /= weights.sum()
        residual = float(np.abs(M @ weights).max(initial=0.0))
        if residual > FEASIBILITY_TOLERANCE:
            logger.warning(f"Convex hull weights leave residual {residual:.3e}")
        return HullResult(True, weights, None, result.iterations)
    direction = -result.multipliers[:d]
    return HullResult(False, np.zeros(m), direction, result.iterations)


def _mps_number(value: float) -> str:
    for digits in range(12, 0, -1):
        text = f"{value:.{digits}g}"
        if len(text) <= 12:
            return text
    return f"{value:.5e}"


def write_mps(problem: LpProblem, path: Path) -> Path:
    """Dump an LpProblem in fixed-format MPS for cross-checking with external solvers.

    Columns are written in problem order (a_0..a_n, z for build_lp problems);
    rows are named U<i>/L<i> after their labels, or R<k> when unlabelled.
    """
    rows, cols = problem.shape
    names = list(problem.column_names) or [f"X{j}" for j in range(cols)]
    if problem.labels:
        row_names = [f"{'U' if side == 'upper' else 'L'}{i}" for i, side in problem.labels]
    else:
        row_names = [f"R{k}" for k in range(rows)]

    lines = ["NAME          CHEBPROTO", "ROWS", " N  COST"]
    lines += [f" L  {name}" for name in row_names]
    lines.append("COLUMNS")
    for j, column in enumerate(names):
        entries = [("COST", problem.objective[j])] if problem.objective[j] != 0 else []
        entries += [(row_names[k], problem.matrix[k, j]) for k in range(rows) if problem.matrix[k, j] != 0]
        for row_name, value in entries:
            lines.append(f"    {column:<8}  {row_name:<8}  {_mps_number(float(value)):>12}")
    lines.append("RHS")
    for k in range(rows):
        if problem.rhs[k] != 0:
            lines.append(f"    {'RHS':<8}  {row_names[k]:<8}  {_mps_number(float(problem.rhs[k])):>12}")
    lines.append("BOUNDS")
    for j, column in enumerate(names):
        if problem.free[j]:
            lines.append(f" FR {'BND':<8}  {column:<8}")
    lines.append("ENDATA")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    logger.info(f"Wrote LP ({rows} rows, {cols} columns) -> {path}")
    return path
