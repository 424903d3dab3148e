"""Run documents: what a command computed, in JSON and as a readable tree."""

from __future__ import annotations

import hashlib
import io
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

from rich.console import Console
from rich.tree import Tree

from chebproto.basis import ChebyshevBasis
from chebproto.config import get_settings
from chebproto.envelope import build_envelope, lower_bound
from chebproto.errors import DomainError
from chebproto.models import Prototype, SignalGroup
from chebproto.optimality import OptimalityVerdict, check_alternation, deviation_profile

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class InputFingerprint:
    """Identifies the signal group a document was computed from."""

    sha256: str
    grid_size: int
    signal_count: int
    a: float
    b: float

    @classmethod
    def of(cls, group: SignalGroup) -> InputFingerprint:
        digest = hashlib.sha256()
        digest.update(group.grid.points.tobytes())
        digest.update("\x1f".join(group.ids).encode())
        digest.update(group.samples.tobytes())
        return cls(
            sha256=digest.hexdigest(),
            grid_size=len(group.grid),
            signal_count=len(group),
            a=group.grid.a,
            b=group.grid.b,
        )


@dataclass
class ClusterRecord:
    """One solved envelope: its members, prototype and certificate verdict."""

    index: int
    members: list[str]
    prototype: Prototype
    delta_star: float
    verdict: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "members": list(self.members),
            "delta_star": self.delta_star,
            "prototype": self.prototype.to_dict(),
            "verdict": self.verdict,
        }

    @classmethod
    def from_dict(cls, data: dict) -> ClusterRecord:
        return cls(
            index=int(data["index"]),
            members=list(data["members"]),
            prototype=Prototype.from_dict(data["prototype"]),
            delta_star=float(data["delta_star"]),
            verdict=dict(data.get("verdict") or {}),
        )


@dataclass
class RunDocument:
    """Everything a command produced.

    Timing is kept for display only; it never reaches the JSON document, so
    identical inputs give byte-identical files.
    """

    command: str
    fingerprint: InputFingerprint
    basis: dict
    config: dict
    clusters: list[ClusterRecord]
    assignment: dict[str, int] = field(default_factory=dict)
    events: list[dict] = field(default_factory=list)
    objectives: list[dict] = field(default_factory=list)
    converged: bool | None = None
    timing: dict[str, float] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        data = {
            "schema_version": self.schema_version,
            "command": self.command,
            "input": asdict(self.fingerprint),
            "basis": self.basis,
            "config": self.config,
            "clusters": [record.to_dict() for record in self.clusters],
            "assignment": dict(self.assignment),
            "events": list(self.events),
            "objectives": list(self.objectives),
        }
        if self.converged is not None:
            data["converged"] = self.converged
        return data

    @classmethod
    def from_dict(cls, data: dict) -> RunDocument:
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise DomainError(f"Unsupported document schema version {version!r}")
        return cls(
            command=data["command"],
            fingerprint=InputFingerprint(**data["input"]),
            basis=dict(data["basis"]),
            config=dict(data.get("config") or {}),
            clusters=[ClusterRecord.from_dict(c) for c in data["clusters"]],
            assignment={k: int(v) for k, v in (data.get("assignment") or {}).items()},
            events=list(data.get("events") or []),
            objectives=list(data.get("objectives") or []),
            converged=data.get("converged"),
        )

    def to_json(self) -> str:
        # json writes floats with repr, the shortest string that round-trips
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def write_json(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json())
        logger.info(f"Wrote run document: {path}")
        return path

    @classmethod
    def load(cls, path: Path) -> RunDocument:
        return cls.from_dict(json.loads(Path(path).read_text()))

    def tree(self) -> Tree:
        """Human-readable tree of the run for the console or a text file."""
        root = Tree(f"[bold]chebproto {self.command}[/bold]")
        inputs = root.add("input")
        inputs.add(f"signals: {self.fingerprint.signal_count}")
        inputs.add(f"grid: {self.fingerprint.grid_size} points on [{self.fingerprint.a!r}, {self.fingerprint.b!r}]")
        inputs.add(f"sha256: {self.fingerprint.sha256[:16]}")
        root.add(f"basis: {self.basis['kind']} degree {self.basis['degree']}")
        if self.converged is not None:
            root.add(f"converged: {self.converged}")

        for record in self.clusters:
            prototype = record.prototype
            node = root.add(f"cluster {record.index} ({len(record.members)} signals)")
            node.add(f"delta: {prototype.delta!r}")
            node.add(f"lower bound: {record.delta_star!r}")
            node.add(f"coefficients: {', '.join(repr(c) for c in prototype.coeffs)}")
            node.add(
                f"termination: {prototype.termination} "
                f"({prototype.iterations} iterations, {prototype.exchanges} exchanges)"
            )
            if prototype.double_point is not None:
                node.add(f"double point: index {prototype.double_point}")
            if prototype.reference is not None:
                pairs = ", ".join(
                    f"{i}{'+' if s > 0 else '-'}"
                    for i, s in zip(prototype.reference.nodes, prototype.reference.signs)
                )
                node.add(f"reference: {pairs}")
            if record.verdict:
                node.add(f"verdict: {record.verdict.get('reason')}")

        if self.timing:
            timing = root.add("timing")
            for name, seconds in self.timing.items():
                timing.add(f"{name}: {seconds:.3f}s")
        return root

    def render_text(self) -> str:
        console = Console(file=io.StringIO(), record=True, width=100, color_system=None)
        console.print(self.tree())
        return console.export_text()

    def write_text(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render_text())
        logger.info(f"Wrote run summary: {path}")
        return path


def cluster_record(
    index: int,
    group: SignalGroup,
    basis: ChebyshevBasis,
    prototype: Prototype,
    *,
    tolerance: float | None = None,
) -> ClusterRecord:
    """Record for a solved group, re-certifying its prototype on the way."""
    env = build_envelope(group)
    profile = deviation_profile(env, basis, prototype.coeffs, tolerance=tolerance)
    verdict = check_alternation(profile, basis.degree)
    return ClusterRecord(
        index=index,
        members=list(group.ids),
        prototype=prototype,
        delta_star=lower_bound(env, tolerance).delta_star,
        verdict=verdict.to_dict(),
    )


def basis_from_dict(data: dict) -> ChebyshevBasis:
    kind = data["kind"]
    if kind == "monomial":
        return ChebyshevBasis.monomial(int(data["degree"]), tuple(data["domain"]))
    if kind == "chebyshev":
        return ChebyshevBasis.chebyshev(int(data["degree"]), tuple(data["domain"]))
    raise DomainError(f"Documents with a '{kind}' basis cannot be re-verified")


def verify_document(
    document: RunDocument,
    group: SignalGroup,
    *,
    tolerance: float | None = None,
) -> list[tuple[ClusterRecord, OptimalityVerdict]]:
    """Re-certify every cluster of a loaded document against the input signals.

    A cluster passes when its prototype still attains the recorded delta and
    the alternation check accepts it.

    Raises:
        DomainError: If the document was computed from different signals.
    """
    tol = get_settings().tolerance if tolerance is None else tolerance
    if InputFingerprint.of(group) != document.fingerprint:
        raise DomainError("Document was produced from different input signals")
    basis = basis_from_dict(document.basis)
    results: list[tuple[ClusterRecord, OptimalityVerdict]] = []
    for record in document.clusters:
        env = build_envelope(group.subset(record.members))
        profile = deviation_profile(env, basis, record.prototype.coeffs, tolerance=tol)
        verdict = check_alternation(profile, basis.degree)
        if abs(profile.delta - record.prototype.delta) > tol * max(1.0, profile.delta):
            logger.warning(
                f"Cluster {record.index}: recorded delta {record.prototype.delta!r} "
                f"but prototype attains {profile.delta!r}"
            )
            verdict = OptimalityVerdict(False, "not-optimal", profile.delta)
        results.append((record, verdict))
    return results
