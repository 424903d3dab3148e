"""CLI interface for chebproto."""

from __future__ import annotations

import logging
import time
from pathlib import Path

import numpy as np
import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from chebproto.basis import ChebyshevBasis, check_chebyshev_system, evaluate_on_grid
from chebproto.clustering import ClusterConfig, k_medoid
from chebproto.config import get_settings
from chebproto.envelope import build_envelope, lower_bound
from chebproto.errors import (
    ChebprotoError,
    CsvParseError,
    DimensionError,
    DomainError,
    EmptyInputError,
    InsufficientDataError,
    NotFoundError,
)
from chebproto.models import SignalGroup
from chebproto.optimality import check_alternation, check_subdifferential, deviation_profile
from chebproto.records import (
    InputFingerprint,
    RunDocument,
    cluster_record,
    ingest_csv,
    verify_document,
    write_trace,
)
from chebproto.solvers.registry import available_solvers, get_solver

logger = logging.getLogger(__name__)

app = typer.Typer(
    name="chebproto",
    help="Two-curve Chebyshev approximation and uniform-norm curve clustering.",
    no_args_is_help=True,
)

console = Console()

INPUT_ERRORS = (
    CsvParseError,
    DimensionError,
    DomainError,
    EmptyInputError,
    InsufficientDataError,
    NotFoundError,
    FileNotFoundError,
)

_BASIS_KINDS = ["monomial", "chebyshev"]
_LAYOUTS = ["wide", "long"]


def _configure_logging(verbose: bool) -> None:
    level = "DEBUG" if verbose else get_settings().log_level.upper()
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _fail(message: str, code: int = 2) -> typer.Exit:
    console.print(f"[red]{message}[/red]")
    return typer.Exit(code)


def _require_choice(value: str, choices: list[str], flag: str) -> None:
    if value not in choices:
        raise _fail(f"Invalid {flag} '{value}'. Choose from: {', '.join(choices)}")


def _load(path: Path, layout: str) -> SignalGroup:
    _require_choice(layout, _LAYOUTS, "--layout")
    try:
        return ingest_csv(path, layout)  # type: ignore[arg-type]
    except INPUT_ERRORS as e:
        raise _fail(f"Cannot read {path}: {e}")


def _advise(basis: ChebyshevBasis, group: SignalGroup) -> None:
    """Warn (never block) when the basis looks degenerate on the grid."""
    if len(group.grid) < basis.dimension:
        return
    verdict = check_chebyshev_system(basis, group.grid)
    if not verdict.passed:
        console.print(
            Panel(
                f"Scaled determinant vanishes on nodes {list(verdict.witness or ())}.\n"
                "Results may be unreliable.",
                title="Basis check",
                style="yellow",
            )
        )


def _write_outputs(document: RunDocument, out: Path | None) -> None:
    if out is None:
        return
    document.write_json(out)
    document.write_text(out.with_suffix(".txt"))
    console.print(f"[dim]Wrote {out} and {out.with_suffix('.txt')}[/dim]")


def _prototype_table(document: RunDocument) -> Table:
    table = Table(title="Prototypes")
    table.add_column("Cluster", style="cyan", width=7)
    table.add_column("Signals", justify="right")
    table.add_column("Delta", style="bold")
    table.add_column("Lower bound")
    table.add_column("Termination", style="magenta")
    table.add_column("Iter", justify="right")
    for record in document.clusters:
        table.add_row(
            str(record.index),
            str(len(record.members)),
            f"{record.prototype.delta:.10g}",
            f"{record.delta_star:.10g}",
            record.prototype.termination,
            str(record.prototype.iterations),
        )
    return table


@app.command()
def approx(
    input_path: Path = typer.Argument(..., help="Signal CSV file"),
    degree: int = typer.Option(1, "--degree", "-n", help="Prototype degree n"),
    basis_kind: str = typer.Option("monomial", "--basis", help="Basis: monomial or chebyshev"),
    solver_name: str = typer.Option("exchange", "--solver", help="Solver: exchange, lp or cross-check"),
    tol: float = typer.Option(None, "--tol", help="Deviation tolerance (default: from settings)"),
    max_iter: int = typer.Option(None, "--max-iter", help="Solver iteration limit"),
    layout: str = typer.Option("wide", "--layout", help="CSV layout: wide or long"),
    out: Path = typer.Option(None, "--out", "-o", help="Write the run document (JSON, plus a .txt tree)"),
    trace_out: Path = typer.Option(None, "--trace-out", help="Write a per-grid-point trace CSV"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    Best uniform approximation of a whole signal group by one prototype.

    Example:
        chebproto approx signals.csv --degree 1
        chebproto approx signals.csv --solver lp --out run.json
    """
    _configure_logging(verbose)
    _require_choice(basis_kind, _BASIS_KINDS, "--basis")
    _require_choice(solver_name, available_solvers(), "--solver")
    group = _load(input_path, layout)

    started = time.perf_counter()
    try:
        basis = ChebyshevBasis.for_grid(basis_kind, degree, group.grid)
        _advise(basis, group)
        env = build_envelope(group)
        solver = get_solver(solver_name, tolerance=tol, max_iter=max_iter)
        prototype = solver.solve(env, basis)
        record = cluster_record(0, group, basis, prototype, tolerance=tol)
    except INPUT_ERRORS as e:
        raise _fail(str(e))
    except ChebprotoError as e:
        raise _fail(f"Solver failed: {e}", code=1)

    document = RunDocument(
        command="approx",
        fingerprint=InputFingerprint.of(group),
        basis=basis.describe(),
        config={"solver": solver_name, "tolerance": tol, "max_iter": max_iter},
        clusters=[record],
        timing={"solve": time.perf_counter() - started},
    )
    console.print(document.tree())
    _write_outputs(document, out)
    if trace_out is not None:
        write_trace(trace_out, [(env, evaluate_on_grid(basis, prototype.coeffs, env.grid))])

    if not prototype.optimal:
        raise _fail("Solver stopped at its iteration limit", code=1)


@app.command()
def cluster(
    input_path: Path = typer.Argument(..., help="Signal CSV file"),
    k: int = typer.Option(2, "--k", "-k", help="Number of clusters"),
    degree: int = typer.Option(1, "--degree", "-n", help="Prototype degree n"),
    basis_kind: str = typer.Option("monomial", "--basis", help="Basis: monomial or chebyshev"),
    solver_name: str = typer.Option("exchange", "--solver", help="Solver: exchange, lp or cross-check"),
    tol: float = typer.Option(None, "--tol", help="Deviation tolerance (default: from settings)"),
    max_iter: int = typer.Option(None, "--max-iter", help="Outer clustering iterations"),
    seed: int = typer.Option(None, "--seed", help="Seed for breaking initialization ties"),
    layout: str = typer.Option("wide", "--layout", help="CSV layout: wide or long"),
    out: Path = typer.Option(None, "--out", "-o", help="Write the run document (JSON, plus a .txt tree)"),
    trace_out: Path = typer.Option(None, "--trace-out", help="Write a per-grid-point trace CSV"),
    no_skip_rules: bool = typer.Option(False, "--no-skip-rules", help="Re-solve every changed cluster"),
    workers: int = typer.Option(None, "--workers", help="Threads for per-cluster solves"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    k-medoid clustering with Chebyshev prototypes.

    Example:
        chebproto cluster signals.csv --k 3 --degree 2
        chebproto cluster signals.csv --k 2 --no-skip-rules --out run.json
    """
    _configure_logging(verbose)
    _require_choice(basis_kind, _BASIS_KINDS, "--basis")
    _require_choice(solver_name, available_solvers(), "--solver")
    group = _load(input_path, layout)

    started = time.perf_counter()
    try:
        config = ClusterConfig.from_settings(
            k,
            degree=degree,
            basis_kind=basis_kind,
            solver=solver_name,
            max_iter=max_iter,
            tolerance=tol,
            seed=seed,
            workers=workers,
            skip_rules=not no_skip_rules,
        )
        basis = ChebyshevBasis.for_grid(basis_kind, degree, group.grid)
        _advise(basis, group)
        result = k_medoid(group, config, basis=basis)
        state = result.state
        records = [
            cluster_record(slot.index, slot.group, basis, slot.prototype, tolerance=config.tolerance)
            for slot in state.clusters
            if slot.prototype is not None
        ]
    except INPUT_ERRORS as e:
        raise _fail(str(e))
    except ChebprotoError as e:
        raise _fail(f"Clustering failed: {e}", code=1)

    document = RunDocument(
        command="cluster",
        fingerprint=InputFingerprint.of(group),
        basis=basis.describe(),
        config=config.to_dict(),
        clusters=records,
        assignment=dict(state.assignment),
        events=[event.to_dict() for event in state.events],
        objectives=[record.to_dict() for record in state.objectives],
        converged=result.converged,
        timing={"cluster": time.perf_counter() - started},
    )
    console.print(_prototype_table(document))
    solves = sum(1 for event in state.events if event.kind == "solve")
    skips = sum(1 for event in state.events if event.kind == "skip")
    console.print(
        Panel(
            f"[bold]Converged:[/bold] {result.converged}\n"
            f"[bold]Outer iterations:[/bold] {state.iteration}\n"
            f"[bold]Solves / skips:[/bold] {solves} / {skips}",
            title="Clustering",
        )
    )
    _write_outputs(document, out)
    if trace_out is not None:
        write_trace(
            trace_out,
            [(slot.envelope, slot.values) for slot in state.clusters if slot.envelope is not None],
            with_cluster=True,
        )

    if not result.converged:
        raise _fail("Clustering did not converge", code=1)
    if any(not record.prototype.optimal for record in records):
        raise _fail("A cluster solve stopped at its iteration limit", code=1)


@app.command()
def check(
    input_path: Path = typer.Argument(..., help="Signal CSV file"),
    coeffs: str = typer.Option(None, "--coeffs", help="Comma-separated prototype coefficients a_0,...,a_n"),
    from_doc: Path = typer.Option(None, "--from-doc", help="Re-verify a run document written by approx/cluster"),
    basis_kind: str = typer.Option("monomial", "--basis", help="Basis: monomial or chebyshev"),
    tol: float = typer.Option(None, "--tol", help="Deviation tolerance (default: from settings)"),
    layout: str = typer.Option("wide", "--layout", help="CSV layout: wide or long"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    Verify that a prototype is optimal for a signal group.

    Example:
        chebproto check signals.csv --coeffs 0.5,0.25
        chebproto check signals.csv --from-doc run.json
    """
    _configure_logging(verbose)
    if (coeffs is None) == (from_doc is None):
        raise _fail("Pass exactly one of --coeffs or --from-doc")
    _require_choice(basis_kind, _BASIS_KINDS, "--basis")
    group = _load(input_path, layout)

    if from_doc is not None:
        try:
            results = verify_document(RunDocument.load(from_doc), group, tolerance=tol)
        except INPUT_ERRORS as e:
            raise _fail(str(e))
        except (KeyError, ValueError) as e:
            raise _fail(f"Malformed run document {from_doc}: {e}")

        table = Table(title="Certificate check")
        table.add_column("Cluster", style="cyan")
        table.add_column("Delta")
        table.add_column("Verdict", style="bold")
        for record, verdict in results:
            style = "green" if verdict.optimal else "red"
            table.add_row(str(record.index), f"{verdict.delta:.10g}", f"[{style}]{verdict.reason}[/{style}]")
        console.print(table)
        if not all(verdict.optimal for _, verdict in results):
            raise typer.Exit(1)
        return

    try:
        values = [float(c) for c in coeffs.split(",") if c.strip()]
    except ValueError:
        raise _fail(f"Cannot parse coefficients '{coeffs}'")
    if not values or not np.all(np.isfinite(values)):
        raise _fail(f"Cannot parse coefficients '{coeffs}'")

    try:
        basis = ChebyshevBasis.for_grid(basis_kind, len(values) - 1, group.grid)
        env = build_envelope(group)
        profile = deviation_profile(env, basis, values, tolerance=tol)
        verdict = check_alternation(profile, basis.degree)
        hull = check_subdifferential(profile, basis, group.grid)
    except INPUT_ERRORS as e:
        raise _fail(str(e))

    if verdict.optimal != hull.optimal:
        logger.warning("Alternation and subdifferential checks disagree")
    style = "green" if verdict.optimal else "red"
    console.print(
        Panel(
            f"[bold]Delta:[/bold] {profile.delta!r}\n"
            f"[bold]Lower bound:[/bold] {lower_bound(env, tol).delta_star!r}\n"
            f"[bold]Verdict:[/bold] [{style}]{'optimal' if verdict.optimal else 'not optimal'}[/{style}] "
            f"({verdict.reason})",
            title="Prototype check",
        )
    )
    if not verdict.optimal:
        raise typer.Exit(1)


@app.command()
def envelope(
    input_path: Path = typer.Argument(..., help="Signal CSV file"),
    layout: str = typer.Option("wide", "--layout", help="CSV layout: wide or long"),
    trace_out: Path = typer.Option(None, "--trace-out", help="Write S_max/S_min as a trace CSV"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    Show the upper and lower envelope of a signal group.
    """
    _configure_logging(verbose)
    group = _load(input_path, layout)
    env = build_envelope(group)
    bound = lower_bound(env)

    table = Table(title="Envelope")
    table.add_column("t", style="cyan")
    table.add_column("S_max")
    table.add_column("S_min")
    table.add_column("Witnesses", style="dim")
    for i, t in enumerate(group.grid.points):
        witnesses = f"{env.upper_witness[i]} / {env.lower_witness[i]}" if env.upper_witness and env.lower_witness else ""
        table.add_row(f"{t:.6g}", f"{env.upper[i]:.10g}", f"{env.lower[i]:.10g}", witnesses)
    console.print(table)
    console.print(
        Panel(
            f"[bold]Lower bound:[/bold] {bound.delta_star!r}\n"
            f"[bold]Widest at:[/bold] {[float(group.grid.points[i]) for i in bound.witnesses]}",
            title="Maximal difference",
        )
    )
    if trace_out is not None:
        write_trace(trace_out, [(env, None)])


@app.command()
def config():
    """Show current configuration."""
    console.print(Panel("[bold]Current Configuration[/bold]", title="chebproto"))

    table = Table(show_header=False)
    table.add_column("Setting", style="cyan")
    table.add_column("Value")

    s = get_settings()
    table.add_row("Tolerance", repr(s.tolerance))
    table.add_row("Pivot tolerance", repr(s.pivot_tolerance))
    table.add_row("Singularity threshold", repr(s.singularity_threshold))
    table.add_row("Degeneracy tolerance", repr(s.degeneracy_tolerance))
    table.add_row("Sample budget", str(s.sample_budget))
    table.add_row("Sample seed", str(s.sample_seed))
    table.add_row("", "")
    table.add_row("Exchange max iterations", str(s.exchange_max_iter))
    table.add_row("LP max iterations", str(s.lp_max_iter))
    table.add_row("Clustering max iterations", str(s.max_outer_iter))
    table.add_row("Clustering seed", str(s.seed))
    table.add_row("Workers", str(s.workers))
    table.add_row("Log level", s.log_level)
    table.add_row("Solvers", ", ".join(available_solvers()))

    console.print(table)


if __name__ == "__main__":
    app()
