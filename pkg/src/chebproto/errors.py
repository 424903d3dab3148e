"""Exception hierarchy for chebproto.

Non-exceptional outcomes (LP statuses, convex-hull infeasibility, exchange
termination reasons, optimality verdicts) are returned as values; only
invalid inputs and broken invariants raise.
"""


class ChebprotoError(Exception):
    """Base class for all chebproto errors."""


class DimensionError(ChebprotoError):
    """Array lengths or shapes disagree (coefficients, grids, bases)."""


class DomainError(ChebprotoError):
    """A value lies outside the domain an operation accepts."""


class EmptyInputError(ChebprotoError):
    """An operation received an empty signal group."""


class NotFoundError(ChebprotoError):
    """A referenced signal id does not exist."""


class InsufficientDataError(ChebprotoError):
    """Too few grid points or signals for the requested model."""


class DegenerateBasisError(ChebprotoError):
    """An interpolation system is numerically singular on its nodes."""


class ExchangeError(ChebprotoError):
    """A basis exchange was requested with a violated precondition."""


class SolverDisagreementError(ChebprotoError):
    """Cross-check mode found the exchange and LP optima apart."""

    def __init__(self, exchange_delta: float, lp_delta: float, tolerance: float) -> None:
        super().__init__("Exchange and LP solvers disagree")
        self.exchange_delta = exchange_delta
        self.lp_delta = lp_delta
        self.tolerance = tolerance

    def __str__(self) -> str:
        return (
            f"{self.args[0]}: exchange={self.exchange_delta!r}, lp={self.lp_delta!r} "
            f"(|diff|={abs(self.exchange_delta - self.lp_delta):.3e} > {self.tolerance:.1e})"
        )


class CsvParseError(ChebprotoError):
    """Raised when a signal CSV cannot be turned into a signal group.

    Carries the offending line number and, when known, the signal id and time
    so the CLI can point at the exact cell.
    """

    def __init__(
        self,
        message: str,
        line: int | None = None,
        signal_id: str | None = None,
        time: float | None = None,
    ) -> None:
        super().__init__(message)
        self.line = line
        self.signal_id = signal_id
        self.time = time

    def __str__(self) -> str:
        context: list[str] = []
        if self.line is not None:
            context.append(f"line {self.line}")
        if self.signal_id is not None:
            context.append(f"signal '{self.signal_id}'")
        if self.time is not None:
            context.append(f"t={self.time!r}")
        if not context:
            return str(self.args[0])
        return f"{self.args[0]} ({', '.join(context)})"
