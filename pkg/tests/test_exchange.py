import numpy as np
import pytest

from chebproto.basis import ChebyshevBasis, evaluate, evaluate_on_grid
from chebproto.envelope import build_envelope, classical_envelope
from chebproto.errors import DegenerateBasisError, ExchangeError, InsufficientDataError
from chebproto.models import Envelope, Grid, ReferenceBasis, SignalGroup
from chebproto.solvers import PrototypeSolver
from chebproto.solvers.exchange import (
    ExchangeSolver,
    chebyshev_interpolation,
    exchange_step,
    find_max_deviation,
    initialize_basis,
    solve_exchange,
)
from chebproto.solvers.lp import build_lp, solve_simplex


@pytest.fixture
def parabola() -> tuple[Envelope, ChebyshevBasis]:
    grid = Grid.uniform(0.0, 1.0, 10)
    return classical_envelope(grid, grid.points**2), ChebyshevBasis.monomial(1)


def test_constant_interpolation_is_the_midpoint():
    grid = Grid.from_points([0.0, 1.0])
    env = Envelope(grid, np.array([4.0, 6.0]), np.array([0.0, 2.0]))
    fit = chebyshev_interpolation(env, ChebyshevBasis.monomial(0), ReferenceBasis((0, 1), (1, -1)))
    assert fit.coeffs[0] == pytest.approx(3.0)
    assert fit.deviation == pytest.approx(1.0)


def test_golden_three_node_interpolation(line_basis):
    grid = Grid.from_points([0.0, 0.5, 1.0])
    env = build_envelope(SignalGroup.from_rows(grid, [[1.0, 0.75, 0.5], [0.0, 0.25, 0.5]]))
    fit = chebyshev_interpolation(env, line_basis, ReferenceBasis((0, 1, 2), (1, -1, 1)))
    np.testing.assert_allclose(fit.coeffs, [0.75, -0.5], atol=1e-12)
    assert fit.deviation == pytest.approx(0.25, abs=1e-12)
    assert np.abs(fit.residuals).max() < 1e-12


def test_single_curve_interpolation_matches_classical_levelled_error(parabola):
    env, basis = parabola
    ref = ReferenceBasis((0, 4, 9), (1, -1, 1))
    fit = chebyshev_interpolation(env, basis, ref)
    t = env.grid.points[[0, 4, 9]]
    f = t**2
    weights = np.array([1 / ((t[k] - t[(k + 1) % 3]) * (t[k] - t[(k + 2) % 3])) for k in range(3)])
    assert abs(fit.deviation) == pytest.approx(abs(weights @ f) / np.abs(weights).sum(), rel=1e-12)


def test_interpolation_rejects_singular_custom_basis():
    grid = Grid.from_points([0.0, 1.0, 2.0])
    basis = ChebyshevBasis.custom(grid, [[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]])
    env = classical_envelope(grid, [0.0, 1.0, 0.0])
    with pytest.raises(DegenerateBasisError):
        chebyshev_interpolation(env, basis, ReferenceBasis((0, 1, 2), (1, -1, 1)))


def test_find_max_deviation_golden(golden_envelope, line_basis):
    peak = find_max_deviation(golden_envelope, line_basis, (0.5, 0.0))
    assert peak.index == 0
    assert peak.value == pytest.approx(0.5)
    assert peak.double_point


def test_find_max_deviation_exact_fit():
    grid = Grid.uniform(0.0, 1.0, 5)
    env = classical_envelope(grid, 2.0 + grid.points)
    peak = find_max_deviation(env, ChebyshevBasis.monomial(1), (2.0, 1.0))
    assert peak.value == pytest.approx(0.0, abs=1e-15)


def test_find_max_deviation_below_the_band():
    grid = Grid.from_points([0.0, 0.5, 1.0])
    env = Envelope(grid, np.array([3.0, 5.0, 4.0]), np.array([2.0, 2.0, 2.0]))
    peak = find_max_deviation(env, ChebyshevBasis.monomial(0), (0.0,))
    assert (peak.index, peak.sign, peak.value) == (1, 1, 5.0)
    assert not peak.double_point


def test_exchange_step_replaces_same_sign_neighbour():
    ref = ReferenceBasis((1, 3, 5), (1, -1, 1))
    assert exchange_step(ref, 2, 1) == ReferenceBasis((2, 3, 5), (1, -1, 1))
    assert exchange_step(ref, 4, -1) == ReferenceBasis((1, 4, 5), (1, -1, 1))


def test_exchange_step_drops_the_far_end():
    ref = ReferenceBasis((1, 3, 5), (1, -1, 1))
    assert exchange_step(ref, 0, -1) == ReferenceBasis((0, 1, 3), (-1, 1, -1))
    assert exchange_step(ref, 6, -1) == ReferenceBasis((3, 5, 6), (-1, 1, -1))
    assert exchange_step(ref, 0, 1) == ReferenceBasis((0, 3, 5), (1, -1, 1))


def test_exchange_step_rejects_existing_node():
    with pytest.raises(ExchangeError):
        exchange_step(ReferenceBasis((1, 3, 5), (1, -1, 1)), 3, 1)


def test_golden_example_is_a_double_point(golden_envelope, line_basis):
    report = solve_exchange(golden_envelope, line_basis)
    assert report.delta == pytest.approx(0.5, abs=1e-9)
    assert report.termination == "optimal-double-point"
    assert report.double_point == 0
    assert evaluate(line_basis, report.coeffs, 0.0) == pytest.approx(0.5, abs=1e-12)


def test_golden_initialization_is_immediately_optimal(golden_envelope, line_basis):
    initial = initialize_basis(golden_envelope, line_basis)
    assert initial.immediate_optimal
    assert initial.delta == pytest.approx(0.5, abs=1e-9)
    assert initial.double_point == 0


def test_best_line_for_parabola(parabola):
    env, basis = parabola
    report = solve_exchange(env, basis)
    lp = solve_simplex(build_lp(env, basis))
    assert report.termination == "optimal-alternation"
    assert report.delta == pytest.approx(lp.objective, abs=1e-9)
    assert report.basis is not None and len(report.basis.nodes) == 3
    above = env.upper - evaluate_on_grid(basis, report.coeffs, env.grid)
    for node, sign in zip(report.basis.nodes, report.basis.signs):
        assert sign * above[node] == pytest.approx(report.delta, abs=1e-9)


def test_constant_gap_band(make_instance):
    group, _, _ = make_instance(2, size=30, degree=1, signals=1)
    middle = group.samples[0]
    env = Envelope(group.grid, middle + 1.0, middle - 1.0)
    basis = ChebyshevBasis.monomial(1)
    report = solve_exchange(env, basis)
    assert report.delta >= 1.0 - 1e-9
    assert report.delta == pytest.approx(solve_simplex(build_lp(env, basis)).objective, abs=1e-7)

    straight = Envelope(group.grid, group.grid.points + 1.0, group.grid.points - 1.0)
    initial = initialize_basis(straight, basis)
    assert initial.immediate_optimal
    assert initial.delta == pytest.approx(1.0, abs=1e-9)


def test_zero_width_band_matches_lp():
    grid = Grid.uniform(0.0, 1.0, 20)
    env = classical_envelope(grid, np.exp(grid.points))
    basis = ChebyshevBasis.monomial(2)
    report = solve_exchange(env, basis)
    assert report.delta == pytest.approx(solve_simplex(build_lp(env, basis)).objective, abs=1e-9)
    assert report.termination == "optimal-alternation"


def test_warm_start_from_optimal_certificate_is_a_fixed_point(parabola):
    env, basis = parabola
    cold = solve_exchange(env, basis)
    warm = solve_exchange(env, basis, warm=cold.basis)
    assert warm.warm_started
    assert warm.iterations == 1
    assert warm.exchanges == 0
    assert warm.delta == pytest.approx(cold.delta, abs=1e-12)


def test_stale_warm_basis_falls_back_to_cold_start(parabola):
    env, basis = parabola
    stale = ReferenceBasis((0, 5, 12), (1, -1, 1))
    report = solve_exchange(env, basis, warm=stale)
    assert not report.warm_started
    assert report.warm_rejected is not None
    assert report.delta == pytest.approx(solve_exchange(env, basis).delta, abs=1e-12)
    assert report.to_prototype().warm_rejected == report.warm_rejected


def test_single_point_exchanges_raise_the_deviation():
    grid = Grid.uniform(0.0, 1.0, 64)
    env = classical_envelope(grid, np.exp(grid.points))
    basis = ChebyshevBasis.monomial(2)
    start = ReferenceBasis((0, 10, 20, 30), (1, -1, 1, -1))
    if chebyshev_interpolation(env, basis, start).deviation < 0:
        start = ReferenceBasis(start.nodes, (-1, 1, -1, 1))

    report = solve_exchange(env, basis, warm=start)
    assert report.warm_started
    assert report.termination == "optimal-alternation"
    assert report.exchanged_at
    for position in report.exchanged_at:
        assert report.history[position] > report.history[position - 1]
    assert report.delta == pytest.approx(solve_exchange(env, basis).delta, abs=1e-9)


def test_warm_basis_below_lower_bound_is_rejected(golden_envelope, line_basis):
    # Nodes where the band is narrow interpolate below Delta* = 0.5
    report = solve_exchange(golden_envelope, line_basis, warm=ReferenceBasis((50, 60, 70), (1, -1, 1)))
    assert not report.warm_started
    assert "lower bound" in report.warm_rejected
    assert report.delta == pytest.approx(0.5, abs=1e-9)


def test_iteration_limit(make_instance):
    _, env, basis = make_instance(12, size=120, degree=4, signals=6)
    report = solve_exchange(env, basis, limit=1)
    assert report.termination in {"iteration-limit", "optimal-alternation", "optimal-double-point"}
    assert report.iterations <= 2


def test_too_few_points():
    grid = Grid.from_points([0.0, 1.0])
    with pytest.raises(InsufficientDataError):
        solve_exchange(classical_envelope(grid, [0.0, 1.0]), ChebyshevBasis.monomial(1))


def test_exchange_solver_protocol(golden_envelope, line_basis):
    solver = ExchangeSolver()
    assert isinstance(solver, PrototypeSolver)
    assert solver.capabilities.warm_start
    prototype = solver.solve(golden_envelope, line_basis)
    assert prototype.solver == "exchange"
    assert prototype.double_point == 0
    assert prototype.optimal
