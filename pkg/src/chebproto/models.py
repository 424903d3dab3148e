"""Shared data models for chebproto.

This module contains the immutable value types passed between components:
- Grid: the discrete time points signals are sampled on
- SignalGroup: a labelled matrix of signals over one grid
- Envelope: pointwise upper/lower curves of a group, with witness ids
- ReferenceBasis: alternating node set driving the exchange procedure
- Prototype: a solved cluster centre and how it was certified
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal, Sequence

import numpy as np

from chebproto.errors import DimensionError, DomainError, NotFoundError

Side = Literal["upper", "lower"]
Termination = Literal["optimal-alternation", "optimal-double-point", "iteration-limit"]


def _frozen_array(values: Any, name: str, ndim: int) -> np.ndarray:
    array = np.array(values, dtype=float)
    if array.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-dimensional, got shape {array.shape}")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Grid:
    """Strictly increasing sample times inside the interval [a, b]."""

    points: np.ndarray
    a: float
    b: float

    def __post_init__(self) -> None:
        points = _frozen_array(self.points, "grid points", 1)
        object.__setattr__(self, "points", points)
        if points.size == 0:
            raise DimensionError("Grid needs at least one point")
        if not np.all(np.isfinite(points)):
            raise DomainError("Grid points must be finite")
        if np.any(np.diff(points) <= 0):
            raise DomainError("Grid points must be strictly increasing")
        if not (self.a <= points[0] and points[-1] <= self.b):
            raise DomainError(
                f"Grid points [{points[0]!r}, {points[-1]!r}] fall outside [{self.a!r}, {self.b!r}]"
            )

    @classmethod
    def from_points(
        cls, points: Sequence[float] | np.ndarray, a: float | None = None, b: float | None = None
    ) -> Grid:
        """Build a grid whose endpoints default to the first and last point."""
        array = np.asarray(points, dtype=float)
        if array.size == 0:
            raise DimensionError("Grid needs at least one point")
        return cls(
            points=array,
            a=float(array[0]) if a is None else float(a),
            b=float(array[-1]) if b is None else float(b),
        )

    @classmethod
    def uniform(cls, a: float, b: float, size: int) -> Grid:
        return cls(points=np.linspace(a, b, size), a=float(a), b=float(b))

    def __len__(self) -> int:
        return int(self.points.size)

    def same_as(self, other: Grid) -> bool:
        return other is self or (
            len(other) == len(self) and bool(np.array_equal(other.points, self.points))
        )

    def index_of(self, t: float) -> int | None:
        """Return the index of grid point t, or None when t is not on the grid."""
        i = int(np.searchsorted(self.points, t))
        scale = max(1.0, abs(float(t)))
        for j in (i - 1, i):
            if 0 <= j < len(self) and abs(self.points[j] - t) <= 1e-12 * scale:
                return j
        return None


@dataclass(frozen=True, eq=False)
class SignalGroup:
    """l signals sampled on a shared grid, one row per signal."""

    grid: Grid
    samples: np.ndarray
    ids: tuple[str, ...]

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=float)
        if samples.ndim == 1 and samples.size == 0:
            samples = samples.reshape(0, len(self.grid))
        if samples.ndim != 2 or samples.shape[1] != len(self.grid):
            raise DimensionError(
                f"Signal matrix shape {samples.shape} does not match a grid of {len(self.grid)} points"
            )
        ids = tuple(str(i) for i in self.ids)
        if len(ids) != samples.shape[0]:
            raise DimensionError(f"{len(ids)} ids for {samples.shape[0]} signals")
        if len(set(ids)) != len(ids):
            raise DomainError("Signal ids must be unique")
        if not np.all(np.isfinite(samples)):
            raise DomainError("Signal values must be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "ids", ids)

    @classmethod
    def from_rows(
        cls, grid: Grid, rows: Sequence[Sequence[float]] | np.ndarray, ids: Sequence[str] | None = None
    ) -> SignalGroup:
        matrix = np.asarray(rows, dtype=float)
        if matrix.ndim == 1 and matrix.size:
            matrix = matrix.reshape(1, -1)
        if ids is None:
            ids = [f"s{j}" for j in range(len(matrix))]
        return cls(grid=grid, samples=matrix, ids=tuple(ids))

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def is_empty(self) -> bool:
        return len(self.ids) == 0

    def position(self, signal_id: str) -> int:
        try:
            return self.ids.index(signal_id)
        except ValueError:
            raise NotFoundError(f"Unknown signal id '{signal_id}'") from None

    def row(self, signal_id: str) -> np.ndarray:
        return self.samples[self.position(signal_id)]

    def subset(self, signal_ids: Sequence[str]) -> SignalGroup:
        """Group restricted to the given ids, in the order given."""
        positions = [self.position(i) for i in signal_ids]
        return SignalGroup(
            grid=self.grid,
            samples=self.samples[positions].reshape(len(positions), len(self.grid)),
            ids=tuple(signal_ids),
        )

    def without(self, signal_ids: Sequence[str]) -> SignalGroup:
        dropped = set(signal_ids)
        for signal_id in dropped:
            self.position(signal_id)
        return self.subset([i for i in self.ids if i not in dropped])

    def with_rows(self, signal_ids: Sequence[str], rows: np.ndarray) -> SignalGroup:
        rows = np.asarray(rows, dtype=float).reshape(len(signal_ids), -1)
        if rows.shape[1] != len(self.grid):
            raise DimensionError(
                f"Added rows have {rows.shape[1]} values, grid has {len(self.grid)}"
            )
        return SignalGroup(
            grid=self.grid,
            samples=np.vstack([self.samples, rows]),
            ids=self.ids + tuple(signal_ids),
        )


@dataclass(frozen=True, eq=False)
class Envelope:
    """Pointwise S_max (upper) and S_min (lower) of a signal group.

    Witness ids name the signal attaining each extreme; they are None for
    envelopes built directly from curves.
    """

    grid: Grid
    upper: np.ndarray
    lower: np.ndarray
    upper_witness: tuple[str, ...] | None = None
    lower_witness: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        upper = _frozen_array(self.upper, "upper curve", 1)
        lower = _frozen_array(self.lower, "lower curve", 1)
        if upper.size != len(self.grid) or lower.size != len(self.grid):
            raise DimensionError(
                f"Envelope curves have {upper.size}/{lower.size} values, grid has {len(self.grid)}"
            )
        if np.any(upper < lower):
            raise DomainError("Envelope upper curve lies below the lower curve")
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "lower", lower)

    @property
    def gap(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.upper + self.lower)

    def scaled(self, factor: float) -> Envelope:
        if factor <= 0:
            raise DomainError("Envelope scale factor must be positive")
        return Envelope(
            grid=self.grid,
            upper=self.upper * factor,
            lower=self.lower * factor,
            upper_witness=self.upper_witness,
            lower_witness=self.lower_witness,
        )


@dataclass(frozen=True)
class ReferenceBasis:
    """n+2 sorted grid indices with strictly alternating sign labels.

    A +1 label targets the upper curve, a -1 label the lower curve.
    """

    nodes: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        nodes = tuple(int(i) for i in self.nodes)
        signs = tuple(int(s) for s in self.signs)
        if len(nodes) != len(signs):
            raise DimensionError(f"{len(nodes)} nodes but {len(signs)} signs")
        if len(nodes) < 2:
            raise DimensionError("A reference basis needs at least two nodes")
        if any(s not in (1, -1) for s in signs):
            raise DomainError(f"Signs must be +1 or -1, got {signs}")
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise DomainError(f"Nodes must be strictly increasing, got {nodes}")
        if any(b != -a for a, b in zip(signs, signs[1:])):
            raise DomainError(f"Signs must alternate, got {signs}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "signs", signs)

    def __len__(self) -> int:
        return len(self.nodes)

    def fits(self, grid_size: int, degree: int) -> bool:
        """True when the basis has n+2 nodes that all lie on a grid of this size."""
        return len(self.nodes) == degree + 2 and self.nodes[-1] < grid_size and self.nodes[0] >= 0

    def to_dict(self) -> dict:
        return {"nodes": list(self.nodes), "signs": list(self.signs)}

    @classmethod
    def from_dict(cls, data: dict) -> ReferenceBasis:
        return cls(nodes=tuple(data["nodes"]), signs=tuple(data["signs"]))


@dataclass(frozen=True)
class Prototype:
    """A cluster centre: coefficients, achieved deviation and its certificate.

    Attributes:
        coeffs: Coefficients a_0..a_n of the basis expansion.
        delta: Maximal deviation of the prototype from the envelope.
        reference: Alternating basis certifying optimality (or seeding a warm start).
        double_point: Grid index where both curves attain delta, when that certifies.
        termination: How the solver stopped.
        solver: Registry name of the solver that produced it.
        history: Basis deviation at every solver iteration.
        warm_rejected: Why an offered warm basis was not used.
    """

    coeffs: tuple[float, ...]
    delta: float
    reference: ReferenceBasis | None = None
    double_point: int | None = None
    termination: Termination = "optimal-alternation"
    solver: str = "exchange"
    iterations: int = 0
    exchanges: int = 0
    warm_started: bool = False
    history: tuple[float, ...] = field(default=(), repr=False)
    warm_rejected: str | None = None

    @property
    def optimal(self) -> bool:
        return self.termination != "iteration-limit"

    def to_dict(self) -> dict:
        data: dict[str, Any] = {
            "coeffs": list(self.coeffs),
            "delta": self.delta,
            "termination": self.termination,
            "solver": self.solver,
            "iterations": self.iterations,
            "exchanges": self.exchanges,
            "warm_started": self.warm_started,
            "warm_rejected": self.warm_rejected,
            "history": [float(d) for d in self.history],
            "certificate": {},
        }
        if self.double_point is not None:
            data["certificate"]["double_point"] = self.double_point
        if self.reference is not None:
            data["certificate"]["reference"] = self.reference.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: dict) -> Prototype:
        certificate = data.get("certificate") or {}
        reference = certificate.get("reference")
        return cls(
            coeffs=tuple(float(c) for c in data["coeffs"]),
            delta=float(data["delta"]),
            reference=ReferenceBasis.from_dict(reference) if reference else None,
            double_point=certificate.get("double_point"),
            termination=data.get("termination", "optimal-alternation"),
            solver=data.get("solver", "exchange"),
            iterations=int(data.get("iterations", 0)),
            exchanges=int(data.get("exchanges", 0)),
            warm_started=bool(data.get("warm_started", False)),
            history=tuple(float(d) for d in data.get("history") or ()),
            warm_rejected=data.get("warm_rejected"),
        )
