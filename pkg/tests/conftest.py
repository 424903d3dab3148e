"""Shared fixtures: the two-signal golden example, random instances and an LP oracle."""

from __future__ import annotations

from itertools import combinations
from typing import Callable

import numpy as np
import pytest

from chebproto.basis import ChebyshevBasis
from chebproto.config import Settings, get_settings
from chebproto.envelope import build_envelope
from chebproto.models import Envelope, Grid, SignalGroup
from chebproto.solvers.lp import LpProblem

Instance = tuple[SignalGroup, Envelope, ChebyshevBasis]


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch, tmp_path):
    """Settings come from defaults only, never from a developer's .env."""
    for name in Settings.model_fields:
        monkeypatch.delenv(f"CHEBPROTO_{name.upper()}", raising=False)
    monkeypatch.chdir(tmp_path)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def golden_grid() -> Grid:
    return Grid.uniform(0.0, 1.0, 101)


@pytest.fixture
def golden_group(golden_grid: Grid) -> SignalGroup:
    t = golden_grid.points
    return SignalGroup.from_rows(golden_grid, [1.0 - 0.5 * t, 0.5 * t], ["S1", "S2"])


@pytest.fixture
def golden_envelope(golden_group: SignalGroup) -> Envelope:
    return build_envelope(golden_group)


@pytest.fixture
def line_basis() -> ChebyshevBasis:
    return ChebyshevBasis.monomial(1, (0.0, 1.0))


def smooth_instance(
    seed: int,
    *,
    size: int | None = None,
    signals: int | None = None,
    degree: int | None = None,
    max_size: int = 200,
) -> Instance:
    """Random smooth signals: a shared low-frequency trend plus per-signal wiggles."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(0, 5)) if degree is None else degree
    N = int(rng.integers(max(5, n + 2), max_size + 1)) if size is None else size
    count = int(rng.integers(2, 11)) if signals is None else signals
    grid = Grid.uniform(0.0, 1.0, N)
    t = grid.points
    frequencies = np.arange(4)
    trend = rng.normal(size=4) @ np.cos(np.pi * np.outer(frequencies, t))
    rows = []
    for _ in range(count):
        wiggle = rng.normal(scale=0.3, size=4) @ np.cos(np.pi * np.outer(frequencies + 1, t) + rng.uniform(0, np.pi))
        rows.append(trend + wiggle)
    group = SignalGroup.from_rows(grid, np.array(rows))
    kind = "monomial" if seed % 2 == 0 else "chebyshev"
    return group, build_envelope(group), ChebyshevBasis.for_grid(kind, n, grid)


@pytest.fixture
def make_instance() -> Callable[..., Instance]:
    return smooth_instance


def lp_vertex_optimum(problem: LpProblem) -> float:
    """Minimum objective over all basic feasible solutions (tiny problems only)."""
    rows, cols = problem.shape
    subsets = np.array(list(combinations(range(rows), cols)))
    systems = problem.matrix[subsets]
    rhs = problem.rhs[subsets]
    regular = np.abs(np.linalg.det(systems)) > 1e-9
    points = np.linalg.solve(systems[regular], rhs[regular][..., None])[..., 0]
    feasible = np.all(points @ problem.matrix.T <= problem.rhs + 1e-9, axis=1)
    return float((points[feasible] @ problem.objective).min())


@pytest.fixture
def vertex_oracle() -> Callable[[LpProblem], float]:
    return lp_vertex_optimum
