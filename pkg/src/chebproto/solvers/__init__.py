"""Two-curve minimax solvers."""

from chebproto.solvers.base import (
    PrototypeSolver,
    SolverCapabilities,
)

__all__ = [
    "PrototypeSolver",
    "SolverCapabilities",
]
