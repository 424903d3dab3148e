import numpy as np
import pytest

from chebproto.basis import ChebyshevBasis, check_chebyshev_system, evaluate, evaluate_on_grid
from chebproto.errors import DimensionError, DomainError
from chebproto.models import Grid


@pytest.mark.parametrize(
    ("coeffs", "t", "expected"),
    [
        ((0.5, 0.0), 0.7, 0.5),
        ((0.5, 0.25), 1.0, 0.75),
        ((1.0, -2.0, 1.0), 1.0, 0.0),
    ],
)
def test_evaluate_monomial(coeffs, t, expected):
    basis = ChebyshevBasis.monomial(len(coeffs) - 1)
    assert evaluate(basis, coeffs, t) == pytest.approx(expected, abs=1e-15)


def test_evaluate_rejects_wrong_length_and_domain():
    basis = ChebyshevBasis.monomial(1, (0.0, 1.0))
    with pytest.raises(DimensionError):
        evaluate(basis, (1.0, 2.0, 3.0), 0.5)
    with pytest.raises(DomainError):
        evaluate(basis, (1.0, 2.0), 1.5)


@pytest.mark.parametrize(
    ("coeffs", "points", "expected"),
    [
        ((0.5, 0.0), [0.0, 0.5, 1.0], [0.5, 0.5, 0.5]),
        ((0.0, 1.0), [0.0, 0.5, 1.0], [0.0, 0.5, 1.0]),
        ((1.0, -0.5), [0.0, 1.0], [1.0, 0.5]),
    ],
)
def test_evaluate_on_grid(coeffs, points, expected):
    grid = Grid.from_points(points)
    basis = ChebyshevBasis.monomial(1, (grid.a, grid.b))
    np.testing.assert_allclose(evaluate_on_grid(basis, coeffs, grid), expected, atol=1e-15)


@pytest.mark.parametrize("kind", ["monomial", "chebyshev"])
def test_grid_values_match_pointwise_evaluation(kind):
    grid = Grid.uniform(-1.0, 2.0, 17)
    basis = ChebyshevBasis.for_grid(kind, 3, grid)
    coeffs = np.array([0.3, -1.2, 0.8, 0.05])
    values = evaluate_on_grid(basis, coeffs, grid)
    for i, t in enumerate(grid.points):
        assert values[i] == evaluate(basis, coeffs, t)


def test_evaluate_is_linear():
    basis = ChebyshevBasis.chebyshev(4, (0.0, 3.0))
    rng = np.random.default_rng(7)
    A, B = rng.normal(size=5), rng.normal(size=5)
    t = 1.3
    combined = evaluate(basis, 2.0 * A - 0.5 * B, t)
    separate = 2.0 * evaluate(basis, A, t) - 0.5 * evaluate(basis, B, t)
    assert combined == pytest.approx(separate, rel=1e-12)


def test_chebyshev_kind_maps_domain_to_unit_interval():
    basis = ChebyshevBasis.chebyshev(2, (0.0, 2.0))
    # T_2(x) = 2x^2 - 1 with x = t - 1
    assert evaluate(basis, (0.0, 0.0, 1.0), 0.0) == pytest.approx(1.0)
    assert evaluate(basis, (0.0, 0.0, 1.0), 1.0) == pytest.approx(-1.0)


def test_custom_basis_only_evaluates_on_its_grid():
    grid = Grid.from_points([0.0, 1.0, 2.0])
    basis = ChebyshevBasis.custom(grid, [[1.0, 0.0], [1.0, 1.0], [1.0, 4.0]])
    assert basis.degree == 1
    assert evaluate(basis, (1.0, 1.0), 2.0) == 5.0
    with pytest.raises(DomainError):
        evaluate(basis, (1.0, 1.0), 0.5)
    with pytest.raises(DimensionError):
        basis.matrix(Grid.from_points([0.0, 1.0]))


def test_chebyshev_system_passes_for_distinct_nodes():
    verdict = check_chebyshev_system(ChebyshevBasis.monomial(1), Grid.from_points([0.0, 0.5, 1.0]), 10)
    assert verdict.passed
    assert verdict.exhaustive
    assert verdict.subsets_checked == 3


def test_chebyshev_system_exhaustive_quadratic():
    grid = Grid.from_points([0.0, 0.2, 0.5, 0.7, 1.0])
    verdict = check_chebyshev_system(ChebyshevBasis.monomial(2), grid, 100)
    assert verdict.passed
    assert verdict.subsets_checked == 10


def test_chebyshev_system_fails_on_repeated_rows():
    grid = Grid.from_points([0.0, 1.0, 2.0])
    basis = ChebyshevBasis.custom(grid, [[1.0, 2.0], [1.0, 2.0], [1.0, 3.0]])
    verdict = check_chebyshev_system(basis, grid, 10)
    assert not verdict.passed
    assert verdict.witness == (0, 1)


def test_chebyshev_system_samples_deterministically():
    grid = Grid.uniform(0.0, 1.0, 40)
    basis = ChebyshevBasis.chebyshev(3, (0.0, 1.0))
    first = check_chebyshev_system(basis, grid, 50, seed=3)
    second = check_chebyshev_system(basis, grid, 50, seed=3)
    assert not first.exhaustive
    assert first.subsets_checked == 50
    assert first == second


def test_chebyshev_system_needs_enough_points():
    with pytest.raises(DimensionError):
        check_chebyshev_system(ChebyshevBasis.monomial(3), Grid.from_points([0.0, 1.0]), 10)
