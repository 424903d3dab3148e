"""Extended de la Vallee-Poussin exchange for two-curve minimax approximation.

The state of the procedure is a ReferenceBasis: n+2 grid nodes with
alternating labels, +1 pointing at the upper curve and -1 at the lower one.
Each iteration interpolates the labelled targets with a common deviation d,
scans the grid for the largest deviation and swaps that point into the basis.
The recorded d never decreases.

Two situations fall outside the single-point exchange: starting from the
maximal difference points of the envelope, where one point carries both
labels (a double node), and a maximal deviation found at an existing node on
its opposite side. Both are handled by pivoting on columns (index, sign) of
the minimax LP's dual with a ratio test until the columns form an ordinary
alternating basis again or the double node proves optimal.
"""

from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from chebproto.basis import ChebyshevBasis, evaluate_on_grid
from chebproto.config import get_settings
from chebproto.envelope import deviations, lower_bound
from chebproto.errors import DegenerateBasisError, DimensionError, ExchangeError, InsufficientDataError
from chebproto.models import Envelope, Prototype, ReferenceBasis, Termination
from chebproto.solvers.base import SolverCapabilities

logger = logging.getLogger(__name__)

Column = tuple[int, int]


@dataclass(frozen=True, eq=False)
class InterpolationResult:
    """Chebyshev interpolant of a labelled reference basis.

    Attributes:
        coeffs: Coefficients A.
        deviation: d with S(A, t_k) + sigma_k * d equal to the node's target.
        residuals: Per-node residual of that system.
        reference: The basis that was interpolated.
    """

    coeffs: np.ndarray
    deviation: float
    residuals: np.ndarray
    reference: ReferenceBasis


@dataclass(frozen=True)
class MaxDeviation:
    """Largest deviation of a prototype from an envelope."""

    index: int
    sign: int
    value: float
    double_point: bool


@dataclass
class SolveReport:
    """Outcome of solve_exchange.

    Attributes:
        coeffs: Prototype coefficients.
        delta: Achieved maximal deviation of the coefficients.
        basis: Last reference basis (the certificate on optimal-alternation).
        double_point: Certifying double point on optimal-double-point.
        iterations: Interpolation solves performed.
        exchanges: Basis changes performed.
        termination: Why the loop stopped.
        history: Basis deviation d recorded at every iteration.
        exchanged_at: History positions computed right after a single-point exchange.
        delta_star: Half the widest envelope gap.
        warm_started: True when the supplied warm basis seeded the loop.
        warm_rejected: Why a supplied warm basis was not used.
    """

    coeffs: np.ndarray
    delta: float
    basis: ReferenceBasis | None
    double_point: int | None
    iterations: int
    exchanges: int
    termination: Termination
    history: list[float] = field(default_factory=list)
    delta_star: float = 0.0
    warm_started: bool = False
    warm_rejected: str | None = None
    exchanged_at: list[int] = field(default_factory=list)

    def to_prototype(self, solver: str = "exchange") -> Prototype:
        return Prototype(
            coeffs=tuple(float(a) for a in self.coeffs),
            delta=float(self.delta),
            reference=self.basis,
            double_point=self.double_point,
            termination=self.termination,
            solver=solver,
            iterations=self.iterations,
            exchanges=self.exchanges,
            warm_started=self.warm_started,
            history=tuple(self.history),
            warm_rejected=self.warm_rejected,
        )


@dataclass
class InitialBasis:
    """Starting point of the exchange loop.

    Either `reference` is an alternating basis to iterate from, or the
    maximal difference points already give the optimum (`immediate_optimal`).
    """

    reference: ReferenceBasis | None
    coeffs: np.ndarray | None = None
    delta: float | None = None
    double_point: int | None = None
    termination: Termination | None = None
    iterations: int = 0
    exchanges: int = 0
    history: list[float] = field(default_factory=list)

    @property
    def immediate_optimal(self) -> bool:
        return self.termination is not None and self.termination != "iteration-limit"


def _solve_scaled(matrix: np.ndarray, rhs: np.ndarray, threshold: float) -> np.ndarray:
    """Solve after equilibrating rows; reject numerically singular systems."""
    scale = np.abs(matrix).max(axis=1)
    scale[scale == 0] = 1.0
    scaled = matrix / scale[:, None]
    try:
        condition = float(np.linalg.cond(scaled))
    except np.linalg.LinAlgError:
        condition = float("inf")
    if not np.isfinite(condition) or 1.0 / condition < threshold:
        raise DegenerateBasisError(
            f"Interpolation system is singular (condition {condition:.3e})"
        )
    return np.linalg.solve(scaled, rhs / scale)


def _require_reference(ref: ReferenceBasis, size: int, degree: int) -> None:
    if not ref.fits(size, degree):
        raise DimensionError(
            f"Reference basis {ref.nodes} does not fit a degree {degree} basis on {size} points"
        )


def chebyshev_interpolation(
    env: Envelope,
    basis: ChebyshevBasis,
    ref: ReferenceBasis,
    *,
    singularity_threshold: float | None = None,
) -> InterpolationResult:
    """Interpolate the labelled targets of a reference basis with a common deviation.

    For sigma_k = +1 the node satisfies S(A, t_k) = upper[t_k] - d, for
    sigma_k = -1 it satisfies S(A, t_k) = lower[t_k] + d.

    Raises:
        DimensionError: If the basis does not have n+2 nodes on the grid.
        DegenerateBasisError: If the (n+2)x(n+2) system is numerically singular.
    """
    threshold = (
        get_settings().singularity_threshold if singularity_threshold is None else singularity_threshold
    )
    design = basis.matrix(env.grid)
    _require_reference(ref, len(env.grid), basis.degree)
    nodes = np.array(ref.nodes)
    signs = np.array(ref.signs, dtype=float)
    system = np.hstack([design[nodes], signs[:, None]])
    target = np.where(signs > 0, env.upper[nodes], env.lower[nodes])
    solution = _solve_scaled(system, target, threshold)
    return InterpolationResult(
        coeffs=solution[:-1],
        deviation=float(solution[-1]),
        residuals=system @ solution - target,
        reference=ref,
    )


def _peak(above: np.ndarray, below: np.ndarray, tolerance: float) -> MaxDeviation:
    worst = np.maximum(above, below)
    index = int(np.argmax(worst))
    value = float(worst[index])
    return MaxDeviation(
        index=index,
        sign=1 if above[index] >= below[index] else -1,
        value=value,
        double_point=bool(min(above[index], below[index]) >= value - tolerance),
    )


def _double_point(above: np.ndarray, below: np.ndarray, value: float, tolerance: float) -> int | None:
    hits = np.flatnonzero(np.minimum(above, below) >= value - tolerance)
    return int(hits[0]) if hits.size else None


def find_max_deviation(
    env: Envelope,
    basis: ChebyshevBasis,
    coeffs: Sequence[float] | np.ndarray,
    *,
    tolerance: float | None = None,
) -> MaxDeviation:
    """Grid point maximizing max{upper - S, S - lower}; ties go to the lowest index.

    The sign is +1 when the upper deviation attains the maximum. The point is
    a double point when both deviations are within tolerance of it.
    """
    tol = get_settings().tolerance if tolerance is None else tolerance
    above, below = deviations(env, evaluate_on_grid(basis, coeffs, env.grid))
    return _peak(above, below, tol)


def exchange_step(ref: ReferenceBasis, entering: int, entering_sign: int) -> ReferenceBasis:
    """Single-point exchange keeping the labels strictly alternating.

    An interior entering point replaces whichever neighbour shares its sign.
    Beyond either end it replaces the end node when the signs agree;
    otherwise it is prepended/appended and the node at the far end is dropped.

    Raises:
        ExchangeError: If the entering point is already a node or the sign is not +-1.
    """
    if entering_sign not in (1, -1):
        raise ExchangeError(f"Entering sign must be +1 or -1, got {entering_sign}")
    if entering in ref.nodes:
        raise ExchangeError(f"Grid index {entering} is already a basis node")

    nodes = list(ref.nodes)
    signs = list(ref.signs)
    position = bisect.bisect_left(nodes, entering)
    if 0 < position < len(nodes):
        target = position - 1 if signs[position - 1] == entering_sign else position
        nodes[target] = entering
        signs[target] = entering_sign
    elif position == 0:
        if signs[0] == entering_sign:
            nodes[0] = entering
        else:
            nodes = [entering] + nodes[:-1]
            signs = [entering_sign] + signs[:-1]
    else:
        if signs[-1] == entering_sign:
            nodes[-1] = entering
        else:
            nodes = nodes[1:] + [entering]
            signs = signs[1:] + [entering_sign]
    return ReferenceBasis(nodes=tuple(nodes), signs=tuple(signs))


def _column_key(column: Column) -> int:
    index, sign = column
    return 2 * index + (0 if sign > 0 else 1)


@dataclass
class _PhaseOutcome:
    kind: Literal["basis", "optimal", "limit"]
    reference: ReferenceBasis | None = None
    coeffs: np.ndarray | None = None
    delta: float = 0.0
    double_point: int | None = None


class _DoubleNodeAscent:
    """Ratio-test pivoting over (index, sign) columns of the minimax LP's dual.

    The columns are (sign * g(t_index), 1); their weights sum to one and their
    signed combination of g vanishes. A double node contributes both signs of
    the same index. Fits, pivots and the deviation history are shared with the
    exchange loop that owns this object.
    """

    def __init__(
        self,
        env: Envelope,
        basis: ChebyshevBasis,
        *,
        tolerance: float,
        pivot_tolerance: float,
        singularity_threshold: float,
    ) -> None:
        self.env = env
        self.basis = basis
        self.design = basis.matrix(env.grid)
        self.tolerance = tolerance
        self.pivot_tolerance = pivot_tolerance
        self.singularity_threshold = singularity_threshold
        self.iterations = 0
        self.pivots = 0
        self.history: list[float] = []

    def _matrix(self, columns: Sequence[Column]) -> np.ndarray:
        width = self.design.shape[1]
        matrix = np.empty((width + 1, len(columns)))
        for j, (index, sign) in enumerate(columns):
            matrix[:width, j] = sign * self.design[index]
            matrix[width, j] = 1.0
        return matrix

    def _weights(self, matrix: np.ndarray) -> np.ndarray:
        unit = np.zeros(matrix.shape[0])
        unit[-1] = 1.0
        return np.linalg.solve(matrix, unit)

    def _fit(self, columns: Sequence[Column]) -> tuple[np.ndarray, np.ndarray, float, np.ndarray]:
        matrix = self._matrix(columns)
        costs = np.array(
            [self.env.upper[i] if s > 0 else -self.env.lower[i] for i, s in columns]
        )
        solution = _solve_scaled(matrix.T, costs, self.singularity_threshold)
        return matrix, solution[:-1], float(solution[-1]), self._weights(matrix)

    def _as_reference(self, columns: Sequence[Column], weights: np.ndarray) -> ReferenceBasis | None:
        indices = [i for i, _ in columns]
        if len(set(indices)) != len(indices) or np.any(weights <= self.pivot_tolerance):
            return None
        ordered = sorted(columns)
        signs = [s for _, s in ordered]
        if any(b != -a for a, b in zip(signs, signs[1:])):
            return None
        return ReferenceBasis(nodes=tuple(i for i, _ in ordered), signs=tuple(signs))

    def _entering(
        self, above: np.ndarray, below: np.ndarray, level: float, peak: MaxDeviation, bland: bool
    ) -> Column:
        if not bland:
            return peak.index, peak.sign
        violated = [(i, 1) for i in np.flatnonzero(above > level + self.tolerance)]
        violated += [(i, -1) for i in np.flatnonzero(below > level + self.tolerance)]
        index, sign = min(violated, key=_column_key)
        return int(index), sign

    def _insert(
        self, columns: Sequence[Column], entering: Column, above: np.ndarray, below: np.ndarray, level: float
    ) -> ReferenceBasis | None:
        """Add the entering point to a single double node by relabelling tight nodes."""
        index, sign = entering
        indices = sorted({i for i, _ in columns})
        if index in indices or len(indices) + 1 != len(columns):
            return None
        nodes = sorted(indices + [index])
        position = nodes.index(index)
        signs = [sign if abs(k - position) % 2 == 0 else -sign for k in range(len(nodes))]
        for node, label in zip(nodes, signs):
            if node == index:
                continue
            tight = above[node] if label > 0 else below[node]
            if tight < level - self.tolerance:
                return None
        return ReferenceBasis(nodes=tuple(nodes), signs=tuple(signs))

    def _leaving(
        self, matrix: np.ndarray, weights: np.ndarray, columns: Sequence[Column], entering: Column
    ) -> int:
        index, sign = entering
        incoming = np.append(sign * self.design[index], 1.0)
        alpha = np.linalg.solve(matrix, incoming)
        eligible = np.flatnonzero(alpha > self.pivot_tolerance)
        if eligible.size == 0:
            raise ExchangeError("No column can leave; the minimax LP would be unbounded")
        ratios = np.clip(weights[eligible], 0.0, None) / alpha[eligible]
        best = ratios.min()
        ties = eligible[ratios <= best + 1e-12]
        return int(min(ties, key=lambda j: _column_key(columns[j])))

    def run(self, columns: Sequence[Column], limit: int) -> _PhaseOutcome:
        columns = list(columns)
        seen: set[frozenset[Column]] = set()
        level = -np.inf
        bland = False
        while True:
            matrix, coeffs, z, weights = self._fit(columns)
            self.iterations += 1
            self.history.append(z)
            above, below = deviations(self.env, evaluate_on_grid(self.basis, coeffs, self.env.grid))
            peak = _peak(above, below, self.tolerance)
            logger.debug(
                f"Double-node phase: level={z!r} peak={peak.value!r} at {peak.index} ({peak.sign:+d})"
            )

            if peak.value <= z + self.tolerance:
                return _PhaseOutcome(
                    "optimal",
                    reference=self._as_reference(columns, weights),
                    coeffs=coeffs,
                    delta=peak.value,
                    double_point=_double_point(above, below, peak.value, self.tolerance),
                )
            if self.iterations >= limit:
                return _PhaseOutcome("limit", coeffs=coeffs, delta=peak.value)

            if z > level + self.tolerance:
                seen.clear()
                level = z
            key = frozenset(columns)
            if key in seen and not bland:
                logger.debug("Column basis repeated at constant level; switching to Bland's rule")
                bland = True
            seen.add(key)

            entering = self._entering(above, below, z, peak, bland)
            inserted = self._insert(columns, entering, above, below, z)
            if inserted is not None:
                self.pivots += 1
                return _PhaseOutcome("basis", reference=inserted)

            leave = self._leaving(matrix, weights, columns, entering)
            logger.debug(f"Column {columns[leave]} leaves, {entering} enters")
            columns[leave] = entering
            self.pivots += 1
            reference = self._as_reference(columns, self._weights(self._matrix(columns)))
            if reference is not None:
                return _PhaseOutcome("basis", reference=reference)


def _anchor_columns(witnesses: Sequence[int], size: int, degree: int) -> list[Column]:
    """Double node at the first maximal difference point plus n labelled nodes.

    The extra nodes are the next witnesses, padded with the lowest-index
    remaining grid points taken at an even stride. Labels alternate along the
    sorted node sequence starting with +1.
    """
    anchor = witnesses[0]
    others = list(witnesses[1 : degree + 1])
    missing = degree - len(others)
    if missing > 0:
        taken = set(witnesses)
        spare = [i for i in range(size) if i not in taken]
        stride = max(1, len(spare) // missing)
        others += spare[::stride][:missing]
    nodes = sorted([anchor] + others)
    columns: list[Column] = [(anchor, 1), (anchor, -1)]
    for position, node in enumerate(nodes):
        if node != anchor:
            columns.append((node, 1 if position % 2 == 0 else -1))
    return columns


def _settings_or(value: float | int | None, default: float | int) -> float | int:
    return default if value is None else value


def initialize_basis(
    env: Envelope,
    basis: ChebyshevBasis,
    *,
    limit: int | None = None,
    tolerance: float | None = None,
    pivot_tolerance: float | None = None,
    singularity_threshold: float | None = None,
) -> InitialBasis:
    """Starting basis from the envelope's maximal difference points.

    The first witness of the lower bound becomes a double node at level
    Delta*; the midpoint interpolant through it and the next witnesses (or
    padding points) is checked against the grid. If nothing deviates beyond
    Delta* the result is immediately optimal; otherwise the worst point is
    brought in and the labels oriented to alternate around it.

    Raises:
        InsufficientDataError: If the grid has fewer than n+2 points.
    """
    settings = get_settings()
    size = len(env.grid)
    if size < basis.degree + 2:
        raise InsufficientDataError(
            f"Degree {basis.degree} needs at least {basis.degree + 2} grid points, got {size}"
        )
    tol = float(_settings_or(tolerance, settings.tolerance))
    ascent = _DoubleNodeAscent(
        env,
        basis,
        tolerance=tol,
        pivot_tolerance=float(_settings_or(pivot_tolerance, settings.pivot_tolerance)),
        singularity_threshold=float(_settings_or(singularity_threshold, settings.singularity_threshold)),
    )
    bound = lower_bound(env, tol)
    outcome = ascent.run(
        _anchor_columns(bound.witnesses, size, basis.degree),
        int(_settings_or(limit, settings.exchange_max_iter)),
    )
    initial = InitialBasis(
        reference=outcome.reference,
        iterations=ascent.iterations,
        exchanges=ascent.pivots,
        history=list(ascent.history),
    )
    if outcome.kind != "basis":
        initial.coeffs = outcome.coeffs
        initial.delta = outcome.delta
        initial.double_point = outcome.double_point
        initial.termination = _termination(outcome)
    return initial


def _termination(outcome: _PhaseOutcome) -> Termination:
    if outcome.kind == "limit":
        return "iteration-limit"
    return "optimal-double-point" if outcome.double_point is not None else "optimal-alternation"


def _warm_problem(warm: ReferenceBasis, size: int, degree: int) -> str | None:
    if len(warm.nodes) != degree + 2:
        return f"basis has {len(warm.nodes)} nodes, degree {degree} needs {degree + 2}"
    if warm.nodes[-1] >= size or warm.nodes[0] < 0:
        return f"node index outside a grid of {size} points"
    return None


def solve_exchange(
    env: Envelope,
    basis: ChebyshevBasis,
    warm: ReferenceBasis | None = None,
    limit: int | None = None,
    *,
    tolerance: float | None = None,
    pivot_tolerance: float | None = None,
    singularity_threshold: float | None = None,
) -> SolveReport:
    """Best uniform approximation of an envelope by the exchange procedure.

    Args:
        env: Envelope to approximate.
        basis: Chebyshev system the prototype is built from.
        warm: Optional basis from a previous solve. It is used when it fits
            the grid, interpolates, and its deviation is not below Delta*;
            otherwise the loop starts cold and the reason is reported.
        limit: Maximum number of interpolation solves.
        tolerance: Deviation tolerance for optimality and ties.
        pivot_tolerance: Ratio-test threshold of the double-node phase.
        singularity_threshold: Reciprocal-condition bound for interpolation.

    Returns:
        SolveReport with coefficients, achieved deviation, certificate and history.

    Raises:
        InsufficientDataError: If the grid has fewer than n+2 points.
        DegenerateBasisError: If a basis becomes numerically singular.
    """
    settings = get_settings()
    size = len(env.grid)
    degree = basis.degree
    if size < degree + 2:
        raise InsufficientDataError(
            f"Degree {degree} needs at least {degree + 2} grid points, got {size}"
        )
    tol = float(_settings_or(tolerance, settings.tolerance))
    threshold = float(_settings_or(singularity_threshold, settings.singularity_threshold))
    max_iter = int(_settings_or(limit, settings.exchange_max_iter))
    ascent = _DoubleNodeAscent(
        env,
        basis,
        tolerance=tol,
        pivot_tolerance=float(_settings_or(pivot_tolerance, settings.pivot_tolerance)),
        singularity_threshold=threshold,
    )
    bound = lower_bound(env, tol)

    def report(
        coeffs: np.ndarray,
        delta: float,
        termination: Termination,
        reference: ReferenceBasis | None,
        double_point: int | None = None,
    ) -> SolveReport:
        logger.debug(
            f"Exchange finished: {termination} delta={delta!r} after {ascent.iterations} iterations"
        )
        return SolveReport(
            coeffs=np.asarray(coeffs, dtype=float),
            delta=float(delta),
            basis=reference,
            double_point=double_point,
            iterations=ascent.iterations,
            exchanges=ascent.pivots,
            termination=termination,
            history=ascent.history,
            delta_star=bound.delta_star,
            warm_started=warm_started,
            warm_rejected=warm_rejected,
            exchanged_at=list(exchanged_at),
        )

    def from_phase(outcome: _PhaseOutcome, fallback: ReferenceBasis | None) -> SolveReport:
        assert outcome.coeffs is not None
        termination = _termination(outcome)
        reference = outcome.reference
        if reference is None and termination != "optimal-alternation":
            reference = fallback
        return report(outcome.coeffs, outcome.delta, termination, reference, outcome.double_point)

    reference: ReferenceBasis | None = None
    warm_started = False
    exchanged = False
    exchanged_at: list[int] = []
    warm_rejected: str | None = None
    if warm is not None:
        warm_rejected = _warm_problem(warm, size, degree)
        if warm_rejected is None:
            try:
                trial = chebyshev_interpolation(env, basis, warm, singularity_threshold=threshold)
            except DegenerateBasisError:
                warm_rejected = "interpolation system is singular"
            else:
                if trial.deviation < bound.delta_star - tol:
                    warm_rejected = (
                        f"basis deviation {trial.deviation!r} below lower bound {bound.delta_star!r}"
                    )
        if warm_rejected is None:
            reference = warm
            warm_started = True
        else:
            logger.info(f"Warm basis rejected ({warm_rejected}); starting cold")

    if reference is None:
        outcome = ascent.run(_anchor_columns(bound.witnesses, size, degree), max_iter)
        if outcome.kind != "basis":
            return from_phase(outcome, None)
        reference = outcome.reference
        assert reference is not None

    while True:
        fit = chebyshev_interpolation(env, basis, reference, singularity_threshold=threshold)
        ascent.iterations += 1
        ascent.history.append(fit.deviation)
        if exchanged:
            exchanged_at.append(len(ascent.history) - 1)
            exchanged = False
        above, below = deviations(env, evaluate_on_grid(basis, fit.coeffs, env.grid))
        peak = _peak(above, below, tol)
        logger.debug(
            f"Iteration {ascent.iterations}: d={fit.deviation!r} peak={peak.value!r} "
            f"at {peak.index} ({peak.sign:+d})"
        )

        if peak.value <= fit.deviation + tol:
            double = _double_point(above, below, peak.value, tol)
            termination: Termination = (
                "optimal-double-point" if double is not None else "optimal-alternation"
            )
            return report(fit.coeffs, peak.value, termination, reference, double)
        if peak.double_point:
            return report(fit.coeffs, peak.value, "optimal-double-point", reference, peak.index)
        if ascent.iterations >= max_iter:
            logger.warning(f"Exchange hit the iteration limit ({max_iter})")
            return report(fit.coeffs, peak.value, "iteration-limit", reference)

        if peak.index in reference.nodes:
            logger.info(
                f"Maximal deviation at node {peak.index} on its opposite side; pivoting through a double node"
            )
            outcome = ascent.run(list(zip(reference.nodes, reference.signs)), max_iter)
            if outcome.kind != "basis":
                if outcome.kind == "limit":
                    logger.warning(f"Exchange hit the iteration limit ({max_iter})")
                return from_phase(outcome, reference)
            reference = outcome.reference
            assert reference is not None
            continue

        reference = exchange_step(reference, peak.index, peak.sign)
        exchanged = True
        ascent.pivots += 1


class ExchangeSolver:
    """Exchange-procedure solver, the default for clustering."""

    def __init__(
        self,
        tolerance: float | None = None,
        max_iter: int | None = None,
        pivot_tolerance: float | None = None,
        singularity_threshold: float | None = None,
    ) -> None:
        settings = get_settings()
        self.tolerance = settings.tolerance if tolerance is None else tolerance
        self.max_iter = settings.exchange_max_iter if max_iter is None else max_iter
        self.pivot_tolerance = settings.pivot_tolerance if pivot_tolerance is None else pivot_tolerance
        self.singularity_threshold = (
            settings.singularity_threshold if singularity_threshold is None else singularity_threshold
        )

    @property
    def capabilities(self) -> SolverCapabilities:
        return SolverCapabilities(
            name="exchange",
            description="Extended de la Vallee-Poussin exchange with double-node pivoting",
            warm_start=True,
        )

    def solve(
        self,
        envelope: Envelope,
        basis: ChebyshevBasis,
        warm: ReferenceBasis | None = None,
    ) -> Prototype:
        report = solve_exchange(
            envelope,
            basis,
            warm,
            self.max_iter,
            tolerance=self.tolerance,
            pivot_tolerance=self.pivot_tolerance,
            singularity_threshold=self.singularity_threshold,
        )
        return report.to_prototype("exchange")
