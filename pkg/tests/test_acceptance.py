"""End-to-end properties on the golden example and on random corpora."""

from itertools import combinations

import numpy as np
import pytest

from chebproto.basis import ChebyshevBasis
from chebproto.clustering import ClusterConfig, k_medoid
from chebproto.envelope import build_envelope, classical_envelope, lower_bound
from chebproto.models import Grid, SignalGroup
from chebproto.optimality import check_alternation, check_subdifferential, deviation_profile
from chebproto.solvers.exchange import solve_exchange
from chebproto.solvers.lp import build_lp, solve_simplex
from chebproto.solvers.registry import get_solver


@pytest.mark.parametrize("name", ["exchange", "lp"])
def test_golden_objective_for_both_solvers(golden_envelope, line_basis, name):
    prototype = get_solver(name).solve(golden_envelope, line_basis)
    assert prototype.delta == pytest.approx(0.5, abs=1e-9)
    if name == "exchange":
        assert prototype.termination == "optimal-double-point"


@pytest.mark.parametrize("slope", [-0.25, 0.0, 0.25])
def test_golden_family_is_accepted(golden_envelope, line_basis, golden_grid, slope):
    profile = deviation_profile(golden_envelope, line_basis, (0.5, slope))
    assert profile.delta == pytest.approx(0.5, abs=1e-9)
    assert check_alternation(profile, 1).optimal
    assert check_subdifferential(profile, line_basis, golden_grid).optimal


@pytest.mark.parametrize("seed", range(200))
def test_random_corpus(make_instance, seed):
    _, env, basis = make_instance(seed)
    report = solve_exchange(env, basis)
    assert report.termination != "iteration-limit"

    # Nothing beats half the widest gap, and meeting it is a double point
    bound = lower_bound(env)
    assert report.delta >= bound.delta_star - 1e-9
    if report.delta <= bound.delta_star + 1e-10:
        assert report.termination == "optimal-double-point"

    lp = solve_simplex(build_lp(env, basis))
    assert lp.status == "optimal"
    assert abs(report.delta - lp.objective) <= 1e-7

    for coeffs in (report.coeffs, lp.coeffs):
        profile = deviation_profile(env, basis, coeffs)
        alternation = check_alternation(profile, basis.degree)
        hull = check_subdifferential(profile, basis, env.grid)
        assert alternation.optimal
        assert hull.optimal

    history = np.array(report.history)
    assert np.all(np.diff(history) >= -1e-9 * max(1.0, report.delta))
    # Every single-point exchange strictly raises the levelled deviation
    for position in report.exchanged_at:
        assert history[position] > history[position - 1]


def levelled_error_maximum(t: np.ndarray, f: np.ndarray, points: int, chunk: int = 100_000) -> float:
    """Largest levelled error over every subset of `points` nodes.

    On a discrete set the minimax error of a degree points-2 polynomial equals
    this maximum; each subset's error is |sum w_r f_r| / sum |w_r| with the
    divided-difference weights w_r = 1 / prod_{s != r} (t_r - t_s).
    """
    subsets = np.array(list(combinations(range(t.size), points)))
    best = 0.0
    eye = np.eye(points, dtype=bool)
    for start in range(0, len(subsets), chunk):
        block = subsets[start : start + chunk]
        x = t[block]
        diffs = x[:, :, None] - x[:, None, :]
        diffs[:, eye] = 1.0
        weights = 1.0 / diffs.prod(axis=2)
        error = np.abs((weights * f[block]).sum(axis=1)) / np.abs(weights).sum(axis=1)
        best = max(best, float(error.max()))
    return best


def test_exponential_single_curve():
    grid = Grid.uniform(0.0, 1.0, 64)
    f = np.exp(grid.points)
    env = classical_envelope(grid, f)
    basis = ChebyshevBasis.monomial(2)
    report = solve_exchange(env, basis)

    assert report.termination == "optimal-alternation"
    assert len(report.basis.nodes) == 4
    residual = (f - basis.matrix(grid) @ report.coeffs)[list(report.basis.nodes)]
    assert np.all(np.sign(residual[1:]) == -np.sign(residual[:-1]))
    np.testing.assert_allclose(np.abs(residual), report.delta, atol=1e-9)

    assert report.delta == pytest.approx(levelled_error_maximum(grid.points, f, 4), abs=1e-5)


def test_warm_start_after_perturbing_a_quiet_signal(make_instance, record_property):
    rng = np.random.default_rng(2024)
    trials = 100
    not_slower = 0
    for seed in range(5000, 5000 + trials):
        base, _, basis = make_instance(seed, signals=5, max_size=120)
        # The band midpoint never attains an envelope curve at a point with a gap
        group = base.with_rows(["unwitnessed"], build_envelope(base).midpoint)
        env = build_envelope(group)
        assert "unwitnessed" not in set(env.upper_witness) | set(env.lower_witness)
        cold = solve_exchange(env, basis)

        rows = group.samples.copy()
        rows[-1] = rows[-1] + rng.normal(scale=0.05, size=rows.shape[1])
        moved = build_envelope(SignalGroup.from_rows(group.grid, rows, group.ids))

        warm = solve_exchange(moved, basis, warm=cold.basis)
        fresh = solve_exchange(moved, basis)
        assert warm.delta == pytest.approx(fresh.delta, abs=1e-9 * max(1.0, fresh.delta) + 1e-12)
        not_slower += warm.iterations <= fresh.iterations

    record_property("warm_not_slower_fraction", not_slower / trials)


def test_two_noisy_bundles():
    rng = np.random.default_rng(10)
    grid = Grid.uniform(0.0, 1.0, 50)
    rows = [c + rng.uniform(-0.1, 0.1, len(grid)) for c in [0.0] * 5 + [10.0] * 5]
    signals = SignalGroup.from_rows(grid, rows)
    result = k_medoid(signals, ClusterConfig(k=2, degree=0))

    assert result.converged
    assert result.state.iteration <= 5
    for slot in result.state.clusters:
        members = slot.group.samples
        assert len(slot.group) == 5
        midpoint = 0.5 * (members.max() + members.min())
        assert abs(slot.prototype.coeffs[0] - midpoint) <= 0.1
