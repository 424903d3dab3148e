"""k-medoid curve clustering under the Chebyshev (uniform) distance.

The loop alternates two steps until no signal changes cluster:
1. Assign every signal to the prototype nearest in the uniform norm.
2. Recompute each changed cluster's prototype as the best uniform
   approximation of its envelope, skipping the solve when the incumbent is
   provably still optimal and warm-starting it from the previous certificate
   otherwise.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Literal, Mapping, Sequence

import numpy as np

from chebproto.basis import ChebyshevBasis, check_chebyshev_system, evaluate_on_grid
from chebproto.config import Settings, get_settings
from chebproto.envelope import build_envelope, deviations, no_update_needed, update_envelope
from chebproto.errors import DimensionError, DomainError, InsufficientDataError
from chebproto.models import Envelope, Prototype, SignalGroup
from chebproto.optimality import check_alternation, deviation_profile
from chebproto.solvers.base import PrototypeSolver
from chebproto.solvers.registry import available_solvers, get_solver

logger = logging.getLogger(__name__)

SkipRule = Literal["membership-unchanged", "envelope-unchanged", "certificate-retained", "gap-bound"]
EventKind = Literal["solve", "skip", "assign", "repair", "cycle"]


@dataclass(frozen=True)
class ClusterConfig:
    """Knobs of one clustering run.

    Attributes:
        k: Number of clusters.
        degree: Prototype degree n.
        basis_kind: "monomial" or "chebyshev".
        solver: Registry name of the prototype solver.
        max_iter: Outer (assign/update) iterations.
        tolerance: Deviation tolerance shared with the solvers.
        seed: Breaks exact ties during initialization.
        skip_rules: Retain incumbent prototypes when provably still optimal.
        warm_start: Seed re-solves with the previous certificate.
        workers: Threads for per-cluster solves.
        solver_max_iter: Per-solve iteration limit override.
    """

    k: int
    degree: int = 1
    basis_kind: str = "monomial"
    solver: str = "exchange"
    max_iter: int = 50
    tolerance: float = 1e-9
    seed: int = 0
    skip_rules: bool = True
    warm_start: bool = True
    workers: int = 1
    solver_max_iter: int | None = None

    def __post_init__(self) -> None:
        if self.k < 1:
            raise DomainError(f"k must be at least 1, got {self.k}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.workers < 1:
            raise DomainError(f"workers must be at least 1, got {self.workers}")
        if self.solver not in available_solvers():
            raise DomainError(
                f"Unknown solver '{self.solver}'. Available: {', '.join(available_solvers())}"
            )

    @classmethod
    def from_settings(cls, k: int, settings: Settings | None = None, **overrides) -> ClusterConfig:
        """Config with defaults taken from settings, then explicit overrides."""
        settings = settings or get_settings()
        values = {
            "max_iter": settings.max_outer_iter,
            "tolerance": settings.tolerance,
            "seed": settings.seed,
            "workers": settings.workers,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(k=k, **values)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ClusterEvent:
    """One entry of the clustering event log."""

    iteration: int
    kind: EventKind
    cluster: int | None = None
    rule: SkipRule | None = None
    moves: int = 0
    solver_iterations: int = 0
    delta: float | None = None
    detail: str | None = None

    def to_dict(self) -> dict:
        return {key: value for key, value in asdict(self).items() if value is not None}


@dataclass(frozen=True)
class ObjectiveRecord:
    """Sum and maximum of the cluster deviations after an update step."""

    iteration: int
    total: float
    worst: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ClusterSlot:
    """Members, envelope and prototype of one cluster."""

    index: int
    group: SignalGroup
    envelope: Envelope | None = None
    prototype: Prototype | None = None
    values: np.ndarray | None = None
    certified: bool = False


@dataclass
class ClusteringState:
    """Assignments plus per-cluster envelopes and prototypes."""

    signals: SignalGroup
    basis: ChebyshevBasis
    assignment: dict[str, int]
    clusters: list[ClusterSlot]
    iteration: int = 0
    events: list[ClusterEvent] = field(default_factory=list)
    objectives: list[ObjectiveRecord] = field(default_factory=list)

    def members(self, cluster: int) -> list[str]:
        return [i for i in self.signals.ids if self.assignment[i] == cluster]

    def prototype_matrix(self) -> np.ndarray:
        """(k, N) prototype values; clusters without a prototype get NaN rows."""
        rows = np.full((len(self.clusters), len(self.signals.grid)), np.nan)
        for slot in self.clusters:
            if slot.values is not None:
                rows[slot.index] = slot.values
        return rows

    def objective(self) -> ObjectiveRecord:
        deltas = [slot.prototype.delta for slot in self.clusters if slot.prototype is not None]
        return ObjectiveRecord(self.iteration, float(sum(deltas)), float(max(deltas, default=0.0)))


@dataclass
class ClusteringResult:
    state: ClusteringState
    converged: bool


def chebyshev_distance(signal: Sequence[float] | np.ndarray, prototype: Sequence[float] | np.ndarray) -> float:
    """max_i |signal[i] - prototype[i]|.

    Raises:
        DimensionError: If the sequences differ in length.
    """
    a = np.asarray(signal, dtype=float)
    b = np.asarray(prototype, dtype=float)
    if a.shape != b.shape:
        raise DimensionError(f"Cannot compare sequences of length {a.size} and {b.size}")
    return float(np.abs(a - b).max(initial=0.0))


def _distances(samples: np.ndarray, prototypes: np.ndarray) -> np.ndarray:
    return np.abs(samples[:, None, :] - prototypes[None, :, :]).max(axis=2)


def assign(
    signals: SignalGroup,
    prototypes: np.ndarray | Sequence[Sequence[float]],
    incumbent: Mapping[str, int] | None = None,
) -> dict[str, int]:
    """Map each signal to the cluster whose prototype is nearest.

    Exact ties keep the incumbent cluster when it is among them, otherwise
    go to the lowest cluster index.
    """
    matrix = np.asarray(prototypes, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] < 1:
        raise DimensionError("assign needs at least one prototype")
    if matrix.shape[1] != len(signals.grid):
        raise DimensionError(
            f"Prototypes have {matrix.shape[1]} values, grid has {len(signals.grid)}"
        )
    distances = _distances(signals.samples, matrix)
    result: dict[str, int] = {}
    for row, signal_id in enumerate(signals.ids):
        nearest = np.flatnonzero(distances[row] == distances[row].min())
        current = incumbent.get(signal_id) if incumbent else None
        result[signal_id] = int(current) if current in nearest else int(nearest[0])
    return result


def initialize_assignment(signals: SignalGroup, k: int, seed: int = 0) -> dict[str, int]:
    """Farthest-first traversal in the uniform norm.

    The first anchor is the signal with the largest uniform norm; each next
    anchor is the signal farthest from all anchors so far. The seed only
    orders exact ties. Remaining signals join their nearest anchor.

    Raises:
        InsufficientDataError: If there are fewer signals than clusters.
    """
    if k < 1:
        raise DomainError(f"k must be at least 1, got {k}")
    if len(signals) < k:
        raise InsufficientDataError(f"Cannot form {k} clusters from {len(signals)} signals")
    samples = signals.samples
    rank = np.random.default_rng(seed).permutation(len(signals))

    def pick(scores: np.ndarray, allowed: np.ndarray) -> int:
        best = scores[allowed].max()
        candidates = np.flatnonzero(allowed & (scores == best))
        return int(candidates[np.argmin(rank[candidates])])

    allowed = np.ones(len(signals), dtype=bool)
    anchors = [pick(np.abs(samples).max(axis=1), allowed)]
    allowed[anchors[0]] = False
    nearest = np.abs(samples - samples[anchors[0]]).max(axis=1)
    while len(anchors) < k:
        anchor = pick(nearest, allowed)
        anchors.append(anchor)
        allowed[anchor] = False
        nearest = np.minimum(nearest, np.abs(samples - samples[anchor]).max(axis=1))

    labels = np.argmin(_distances(samples, samples[anchors]), axis=1)
    labels[anchors] = np.arange(k)
    logger.debug(f"Initial anchors: {[signals.ids[a] for a in anchors]}")
    return {signal_id: int(label) for signal_id, label in zip(signals.ids, labels)}


def _certificate_holds(
    prototype: Prototype, above: np.ndarray, below: np.ndarray, delta: float, tolerance: float
) -> bool:
    if not prototype.optimal:
        return False
    if prototype.double_point is not None:
        i = prototype.double_point
        return bool(min(above[i], below[i]) >= delta - tolerance)
    if prototype.reference is None:
        return False
    for node, sign in zip(prototype.reference.nodes, prototype.reference.signs):
        side = above[node] if sign > 0 else below[node]
        if side < delta - tolerance:
            return False
    return True


def _retained(
    env: Envelope, prototype: Prototype, values: np.ndarray, tolerance: float
) -> tuple[Prototype, SkipRule] | None:
    """Incumbent prototype if it is provably optimal for a changed envelope."""
    above, below = deviations(env, values)
    delta = float(max(above.max(), below.max()))
    if abs(delta - prototype.delta) <= tolerance and _certificate_holds(
        prototype, above, below, delta, tolerance
    ):
        return prototype, "certificate-retained"
    if no_update_needed(env, values, tolerance):
        point = int(np.flatnonzero(np.abs(env.gap - 2.0 * delta) <= tolerance)[0])
        updated = replace(
            prototype, delta=delta, double_point=point, termination="optimal-double-point"
        )
        return updated, "gap-bound"
    return None


def _refresh(
    state: ClusteringState,
    slot: ClusterSlot,
    members: list[str],
    config: ClusterConfig,
    solver: PrototypeSolver,
) -> tuple[ClusterSlot, ClusterEvent]:
    iteration = state.iteration
    if slot.prototype is not None and set(members) == set(slot.group.ids):
        return slot, ClusterEvent(
            iteration, "skip", slot.index, rule="membership-unchanged", delta=slot.prototype.delta
        )

    if slot.envelope is None or slot.group.is_empty:
        group = state.signals.subset(members)
        env = build_envelope(group)
        changed = True
    else:
        before = set(slot.group.ids)
        after = set(members)
        added = [i for i in members if i not in before]
        removed = [i for i in slot.group.ids if i not in after]
        update = update_envelope(
            slot.envelope,
            slot.group,
            state.signals.subset(added) if added else None,
            removed,
        )
        group, env, changed = update.group, update.envelope, update.changed

    old = slot.prototype
    kept: tuple[Prototype, SkipRule] | None = None
    if config.skip_rules and old is not None and slot.values is not None:
        kept = (old, "envelope-unchanged") if not changed else _retained(env, old, slot.values, config.tolerance)

    if kept is not None:
        prototype, rule = kept
        event = ClusterEvent(iteration, "skip", slot.index, rule=rule, delta=prototype.delta)
        logger.debug(f"Cluster {slot.index}: kept prototype ({rule})")
    else:
        warm = None
        if config.warm_start and old is not None and solver.capabilities.warm_start:
            warm = old.reference
        prototype = solver.solve(env, state.basis, warm)
        event = ClusterEvent(
            iteration,
            "solve",
            slot.index,
            solver_iterations=prototype.iterations,
            delta=prototype.delta,
            detail=prototype.termination,
        )
        logger.debug(
            f"Cluster {slot.index}: solved delta={prototype.delta!r} "
            f"({prototype.termination}, {prototype.iterations} iterations, warm={warm is not None})"
        )

    values = evaluate_on_grid(state.basis, prototype.coeffs, env.grid)
    verdict = check_alternation(
        deviation_profile(env, state.basis, prototype.coeffs, tolerance=config.tolerance),
        state.basis.degree,
    )
    if not verdict.optimal:
        logger.warning(f"Cluster {slot.index}: prototype failed the alternation check")
    refreshed = ClusterSlot(
        index=slot.index,
        group=group,
        envelope=env,
        prototype=prototype,
        values=values,
        certified=verdict.optimal,
    )
    return refreshed, event


def update_prototypes(
    state: ClusteringState,
    config: ClusterConfig,
    solver: PrototypeSolver | None = None,
) -> ClusteringState:
    """Bring every cluster's envelope and prototype in line with the assignment.

    Clusters left without members are re-anchored first (see _repair_empty).
    Clusters are independent; with config.workers > 1 they are refreshed on a
    thread pool. Events are appended in cluster order either way.
    """
    solver = solver or get_solver(
        config.solver, tolerance=config.tolerance, max_iter=config.solver_max_iter
    )
    if any(not state.members(slot.index) for slot in state.clusters):
        assignment, repairs = _repair_empty(state, dict(state.assignment), len(state.clusters))
        state = replace(state, assignment=assignment, events=state.events + repairs)
    jobs = [(slot, state.members(slot.index)) for slot in state.clusters]

    if config.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda job: _refresh(state, job[0], job[1], config, solver), jobs))
    else:
        results = [_refresh(state, slot, members, config, solver) for slot, members in jobs]

    return replace(
        state,
        clusters=[slot for slot, _ in results],
        events=state.events + [event for _, event in results],
    )


def _repair_empty(
    state: ClusteringState, assignment: dict[str, int], k: int
) -> tuple[dict[str, int], list[ClusterEvent]]:
    """Re-anchor empty clusters at the signal farthest from its own prototype."""
    events: list[ClusterEvent] = []
    prototypes = state.prototype_matrix()
    samples = state.signals.samples
    for cluster in range(k):
        sizes = np.bincount(list(assignment.values()), minlength=k)
        if sizes[cluster] > 0:
            continue
        own = np.array([assignment[i] for i in state.signals.ids])
        # Clusters without a prototype yet contribute distance 0
        distances = np.nan_to_num(np.abs(samples - prototypes[own]).max(axis=1), nan=0.0)
        distances[sizes[own] <= 1] = -np.inf
        if np.isneginf(distances).all():
            raise InsufficientDataError(f"No signal can be moved into empty cluster {cluster}")
        chosen = int(np.argmax(distances))
        signal_id = state.signals.ids[chosen]
        logger.info(f"Cluster {cluster} emptied; re-anchored at signal '{signal_id}'")
        events.append(
            ClusterEvent(state.iteration, "repair", cluster, detail=f"moved '{signal_id}' from {own[chosen]}")
        )
        assignment[signal_id] = cluster
    return assignment, events


def k_medoid(
    signals: SignalGroup,
    config: ClusterConfig,
    *,
    basis: ChebyshevBasis | None = None,
    solver: PrototypeSolver | None = None,
) -> ClusteringResult:
    """Cluster signals around Chebyshev prototypes.

    Args:
        signals: Signals to cluster.
        config: Run configuration.
        basis: Basis override (defaults to config.basis_kind/degree over the grid).
        solver: Solver override (defaults to config.solver from the registry).

    Returns:
        ClusteringResult; converged is True iff the last assignment pass moved
        no signal. A repeated assignment ends the run unconverged.

    Raises:
        InsufficientDataError: If there are fewer signals than clusters.
    """
    if len(signals) < config.k:
        raise InsufficientDataError(f"Cannot form {config.k} clusters from {len(signals)} signals")
    basis = basis or ChebyshevBasis.for_grid(config.basis_kind, config.degree, signals.grid)
    solver = solver or get_solver(
        config.solver, tolerance=config.tolerance, max_iter=config.solver_max_iter
    )
    if len(signals.grid) >= basis.dimension:
        verdict = check_chebyshev_system(basis, signals.grid)
        if not verdict.passed:
            logger.warning(f"Basis looks degenerate on nodes {verdict.witness}; continuing anyway")

    state = ClusteringState(
        signals=signals,
        basis=basis,
        assignment=initialize_assignment(signals, config.k, config.seed),
        clusters=[ClusterSlot(index=c, group=signals.subset([])) for c in range(config.k)],
    )
    state = update_prototypes(state, config, solver)
    state.objectives.append(state.objective())

    def key(assignment: dict[str, int]) -> tuple[int, ...]:
        return tuple(assignment[i] for i in signals.ids)

    seen = {key(state.assignment)}
    converged = False
    for iteration in range(1, config.max_iter + 1):
        state.iteration = iteration
        proposed = assign(signals, state.prototype_matrix(), state.assignment)
        proposed, repairs = _repair_empty(state, proposed, config.k)
        moves = sum(1 for i in signals.ids if proposed[i] != state.assignment[i])
        state.events.extend(repairs)
        state.events.append(ClusterEvent(iteration, "assign", moves=moves))
        if moves == 0:
            converged = True
            break

        state.assignment = proposed
        state = update_prototypes(state, config, solver)
        record = state.objective()
        state.objectives.append(record)
        logger.info(
            f"Iteration {iteration}: {moves} moves, sum delta={record.total:.6g}, max delta={record.worst:.6g}"
        )
        if key(proposed) in seen:
            logger.warning(f"Assignment repeated at iteration {iteration}; stopping")
            state.events.append(ClusterEvent(iteration, "cycle", detail="assignment repeated"))
            break
        seen.add(key(proposed))
    else:
        logger.warning(f"Clustering stopped after {config.max_iter} iterations without converging")

    return ClusteringResult(state=state, converged=converged)
