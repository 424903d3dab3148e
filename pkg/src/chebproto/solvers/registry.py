"""Solver registry: exchange, LP and cross-check prototype solvers."""

from __future__ import annotations

import logging
from typing import Callable

from chebproto.basis import ChebyshevBasis
from chebproto.config import Settings, get_settings
from chebproto.errors import SolverDisagreementError
from chebproto.models import Envelope, Prototype, ReferenceBasis, Termination
from chebproto.optimality import check_alternation, deviation_profile
from chebproto.solvers.base import PrototypeSolver, SolverCapabilities
from chebproto.solvers.exchange import ExchangeSolver
from chebproto.solvers.lp import build_lp, solve_simplex

logger = logging.getLogger(__name__)

AGREEMENT_TOLERANCE = 1e-7


class SimplexSolver:
    """Solves the minimax LP directly and certifies the optimum by alternation."""

    def __init__(
        self,
        tolerance: float | None = None,
        max_iter: int | None = None,
        pivot_tolerance: float | None = None,
    ) -> None:
        settings = get_settings()
        self.tolerance = settings.tolerance if tolerance is None else tolerance
        self.max_iter = settings.lp_max_iter if max_iter is None else max_iter
        self.pivot_tolerance = settings.pivot_tolerance if pivot_tolerance is None else pivot_tolerance

    @property
    def capabilities(self) -> SolverCapabilities:
        return SolverCapabilities(
            name="lp",
            description="Dense two-phase simplex on the minimax LP (Bland's rule)",
            warm_start=False,
        )

    def solve(
        self,
        envelope: Envelope,
        basis: ChebyshevBasis,
        warm: ReferenceBasis | None = None,
    ) -> Prototype:
        solution = solve_simplex(
            build_lp(envelope, basis), self.max_iter, pivot_tolerance=self.pivot_tolerance
        )
        if solution.status != "optimal":
            logger.warning(f"LP solve ended with status {solution.status}")
        profile = deviation_profile(envelope, basis, solution.coeffs, tolerance=self.tolerance)
        verdict = check_alternation(profile, basis.degree)
        reference: ReferenceBasis | None = None
        double_point: int | None = None
        if verdict.reason == "double-point":
            double_point = verdict.double_point
        elif verdict.sequence is not None:
            reference = ReferenceBasis(
                nodes=tuple(i for i, _ in verdict.sequence),
                signs=tuple(s for _, s in verdict.sequence),
            )
        elif solution.status == "optimal":
            logger.warning("LP optimum has no alternation certificate at the current tolerance")

        termination: Termination
        if solution.status == "iteration-limit":
            termination = "iteration-limit"
        elif double_point is not None:
            termination = "optimal-double-point"
        else:
            termination = "optimal-alternation"
        return Prototype(
            coeffs=tuple(float(a) for a in solution.coeffs),
            delta=profile.delta,
            reference=reference,
            double_point=double_point,
            termination=termination,
            solver="lp",
            iterations=solution.iterations,
        )


class CrossCheckSolver:
    """Runs exchange and LP on every envelope and insists they agree."""

    def __init__(self, exchange: ExchangeSolver, simplex: SimplexSolver) -> None:
        self.exchange = exchange
        self.simplex = simplex

    @property
    def capabilities(self) -> SolverCapabilities:
        return SolverCapabilities(
            name="cross-check",
            description="Exchange result validated against the LP optimum",
            warm_start=True,
        )

    def solve(
        self,
        envelope: Envelope,
        basis: ChebyshevBasis,
        warm: ReferenceBasis | None = None,
    ) -> Prototype:
        primary = self.exchange.solve(envelope, basis, warm)
        oracle = self.simplex.solve(envelope, basis)
        if abs(primary.delta - oracle.delta) > AGREEMENT_TOLERANCE:
            logger.error(f"Solver disagreement: exchange={primary.delta!r} lp={oracle.delta!r}")
            raise SolverDisagreementError(primary.delta, oracle.delta, AGREEMENT_TOLERANCE)
        logger.debug(f"Cross-check agreed at delta={primary.delta!r}")
        return Prototype(
            coeffs=primary.coeffs,
            delta=primary.delta,
            reference=primary.reference,
            double_point=primary.double_point,
            termination=primary.termination,
            solver="cross-check",
            iterations=primary.iterations,
            exchanges=primary.exchanges,
            warm_started=primary.warm_started,
            history=primary.history,
            warm_rejected=primary.warm_rejected,
        )


def _exchange(settings: Settings, tolerance: float | None, max_iter: int | None) -> ExchangeSolver:
    return ExchangeSolver(
        tolerance=settings.tolerance if tolerance is None else tolerance,
        max_iter=settings.exchange_max_iter if max_iter is None else max_iter,
        pivot_tolerance=settings.pivot_tolerance,
        singularity_threshold=settings.singularity_threshold,
    )


def _simplex(settings: Settings, tolerance: float | None, max_iter: int | None) -> SimplexSolver:
    return SimplexSolver(
        tolerance=settings.tolerance if tolerance is None else tolerance,
        max_iter=settings.lp_max_iter if max_iter is None else max_iter,
        pivot_tolerance=settings.pivot_tolerance,
    )


def _cross_check(settings: Settings, tolerance: float | None, max_iter: int | None) -> CrossCheckSolver:
    return CrossCheckSolver(
        _exchange(settings, tolerance, max_iter),
        _simplex(settings, tolerance, None),
    )


_SOLVERS: dict[str, Callable[[Settings, float | None, int | None], PrototypeSolver]] = {
    "exchange": _exchange,
    "lp": _simplex,
    "cross-check": _cross_check,
}


def available_solvers() -> list[str]:
    return list(_SOLVERS)


def get_solver(
    name: str,
    settings: Settings | None = None,
    *,
    tolerance: float | None = None,
    max_iter: int | None = None,
) -> PrototypeSolver:
    """Get a solver by registry name.

    Args:
        name: One of available_solvers().
        settings: Settings to read defaults from (defaults to get_settings()).
        tolerance: Deviation tolerance override.
        max_iter: Iteration limit override (exchange iterations or LP pivots).

    Raises:
        ValueError: If the name is not registered.
    """
    if name not in _SOLVERS:
        available = ", ".join(_SOLVERS)
        raise ValueError(f"Unknown solver '{name}'. Available: {available}")
    return _SOLVERS[name](settings or get_settings(), tolerance, max_iter)
