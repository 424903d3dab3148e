"""Base protocol and types for prototype solvers."""

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

from chebproto.basis import ChebyshevBasis
from chebproto.models import Envelope, Prototype, ReferenceBasis


@dataclass(frozen=True)
class SolverCapabilities:
    """What a prototype solver offers.

    Shown by the CLI and used by the clustering loop to decide whether a
    previous certificate is worth passing along.
    """

    name: str
    description: str
    warm_start: bool  # Accepts a previous ReferenceBasis


@runtime_checkable
class PrototypeSolver(Protocol):
    """Protocol that all two-curve minimax solvers implement."""

    @property
    def capabilities(self) -> SolverCapabilities:
        """Return the capabilities of this solver."""
        ...

    def solve(
        self,
        envelope: Envelope,
        basis: ChebyshevBasis,
        warm: ReferenceBasis | None = None,
    ) -> Prototype:
        """Compute the best uniform approximation to an envelope.

        Args:
            envelope: Upper/lower curves to approximate.
            basis: Functions the prototype is built from.
            warm: Optional reference basis from a previous solve.

        Returns:
            Prototype with coefficients, achieved deviation and certificate.
        """
        ...
