"""Chebyshev systems of basis functions for prototypes.

A prototype has the form S(A, t) = sum_i a_i * g_i(t) for i = 0..n. Three
families are supported: raw monomials, Chebyshev polynomials on the affinely
mapped domain, and custom functions supplied as a value matrix over a grid.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from chebproto.config import get_settings
from chebproto.errors import DimensionError, DomainError
from chebproto.models import Grid

logger = logging.getLogger(__name__)

BasisKind = Literal["monomial", "chebyshev", "custom"]
BASIS_KINDS: tuple[BasisKind, ...] = ("monomial", "chebyshev", "custom")


@dataclass(frozen=True, eq=False)
class ChebyshevBasis:
    """Functions g_0..g_n evaluable on a domain [a, b].

    Attributes:
        kind: Basis family.
        degree: n; the basis has n+1 functions.
        domain: (a, b) interval the functions are defined on.
        grid: For custom bases, the grid the value matrix is given on.
        values: For custom bases, an (N, n+1) matrix of g_i(t_j).
    """

    kind: BasisKind
    degree: int
    domain: tuple[float, float]
    grid: Grid | None = None
    values: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind not in BASIS_KINDS:
            raise DomainError(f"Unknown basis kind '{self.kind}'. Available: {', '.join(BASIS_KINDS)}")
        if self.degree < 0:
            raise DomainError(f"Basis degree must be nonnegative, got {self.degree}")
        a, b = self.domain
        if not a < b and self.kind == "chebyshev":
            raise DomainError("Chebyshev basis needs a domain with a < b")
        if self.kind == "custom":
            if self.grid is None or self.values is None:
                raise DimensionError("Custom basis needs a grid and a value matrix")
            values = np.array(self.values, dtype=float)
            if values.shape != (len(self.grid), self.degree + 1):
                raise DimensionError(
                    f"Custom value matrix has shape {values.shape}, "
                    f"expected ({len(self.grid)}, {self.degree + 1})"
                )
            values.setflags(write=False)
            object.__setattr__(self, "values", values)

    @classmethod
    def monomial(cls, degree: int, domain: tuple[float, float] = (0.0, 1.0)) -> ChebyshevBasis:
        return cls(kind="monomial", degree=degree, domain=(float(domain[0]), float(domain[1])))

    @classmethod
    def chebyshev(cls, degree: int, domain: tuple[float, float] = (-1.0, 1.0)) -> ChebyshevBasis:
        return cls(kind="chebyshev", degree=degree, domain=(float(domain[0]), float(domain[1])))

    @classmethod
    def custom(cls, grid: Grid, values: Sequence[Sequence[float]] | np.ndarray) -> ChebyshevBasis:
        matrix = np.asarray(values, dtype=float)
        if matrix.ndim != 2:
            raise DimensionError("Custom value matrix must be two-dimensional")
        return cls(
            kind="custom",
            degree=matrix.shape[1] - 1,
            domain=(grid.a, grid.b),
            grid=grid,
            values=matrix,
        )

    @classmethod
    def for_grid(cls, kind: str, degree: int, grid: Grid) -> ChebyshevBasis:
        """Build a monomial or Chebyshev basis over the grid's interval."""
        if kind == "monomial":
            return cls.monomial(degree, (grid.a, grid.b))
        if kind == "chebyshev":
            return cls.chebyshev(degree, (grid.a, grid.b))
        raise DomainError(f"Basis kind '{kind}' cannot be built from a grid alone")

    @property
    def dimension(self) -> int:
        return self.degree + 1

    def rows(self, t: np.ndarray) -> np.ndarray:
        """Matrix of g_i(t_j), one row per point in t.

        Raises:
            DomainError: If a point lies outside the domain (or off the grid for custom bases).
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        a, b = self.domain
        if self.kind == "custom":
            assert self.grid is not None and self.values is not None
            positions = []
            for value in t:
                index = self.grid.index_of(float(value))
                if index is None:
                    raise DomainError(f"t={value!r} is not a point of the custom basis grid")
                positions.append(index)
            return self.values[positions]
        if np.any(t < a) or np.any(t > b):
            raise DomainError(f"Evaluation point outside the basis domain [{a!r}, {b!r}]")
        if self.kind == "monomial":
            return np.vander(t, self.dimension, increasing=True)
        mapped = (2.0 * t - (a + b)) / (b - a)
        return np.polynomial.chebyshev.chebvander(mapped, self.degree)

    def matrix(self, grid: Grid) -> np.ndarray:
        """(N, n+1) design matrix of the basis over a grid."""
        if self.kind == "custom":
            assert self.grid is not None and self.values is not None
            if not self.grid.same_as(grid):
                raise DimensionError("Custom basis was defined on a different grid")
            return self.values
        return self.rows(grid.points)

    def describe(self) -> dict:
        return {"kind": self.kind, "degree": self.degree, "domain": list(self.domain)}


def _combine(rows: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    return (rows * coeffs).sum(axis=-1)


def _check_coeffs(basis: ChebyshevBasis, coeffs: Sequence[float] | np.ndarray) -> np.ndarray:
    array = np.asarray(coeffs, dtype=float)
    if array.ndim != 1 or array.size != basis.dimension:
        raise DimensionError(
            f"Expected {basis.dimension} coefficients for degree {basis.degree}, got {array.size}"
        )
    return array


def evaluate(basis: ChebyshevBasis, coeffs: Sequence[float] | np.ndarray, t: float) -> float:
    """Evaluate S(A, t) = sum_i a_i * g_i(t).

    Raises:
        DimensionError: If len(coeffs) != n+1.
        DomainError: If t is outside the domain, or off-grid for a custom basis.
    """
    array = _check_coeffs(basis, coeffs)
    return float(_combine(basis.rows(np.array([t])), array)[0])


def evaluate_on_grid(
    basis: ChebyshevBasis, coeffs: Sequence[float] | np.ndarray, grid: Grid
) -> np.ndarray:
    """Evaluate the prototype at every grid point."""
    array = _check_coeffs(basis, coeffs)
    return _combine(basis.matrix(grid), array)


@dataclass(frozen=True)
class ChebyshevSystemVerdict:
    """Outcome of a sampled Chebyshev-system check."""

    passed: bool
    witness: tuple[int, ...] | None
    subsets_checked: int
    exhaustive: bool
    smallest_scaled_determinant: float


def _scaled_determinants(design: np.ndarray, subsets: np.ndarray) -> np.ndarray:
    blocks = design[subsets]
    norms = np.linalg.norm(blocks, axis=2).prod(axis=1)
    dets = np.abs(np.linalg.det(blocks))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(norms > 0, dets / np.where(norms > 0, norms, 1.0), 0.0)


def check_chebyshev_system(
    basis: ChebyshevBasis,
    grid: Grid,
    sample_budget: int | None = None,
    *,
    tolerance: float | None = None,
    seed: int | None = None,
) -> ChebyshevSystemVerdict:
    """Check that no (n+1)-point determinant of the basis vanishes on the grid.

    All increasing node subsets are tried when there are at most sample_budget
    of them; otherwise a seeded sample of distinct subsets is drawn. Each
    determinant is divided by the product of its row norms before comparing
    against the tolerance.

    Args:
        basis: Basis to check.
        grid: Grid supplying candidate nodes.
        sample_budget: Maximum number of subsets to evaluate.
        tolerance: Scaled determinant threshold (defaults to settings).
        seed: Sampling seed (defaults to settings).

    Returns:
        Verdict with the first offending subset as witness on failure.

    Raises:
        DimensionError: If the grid has fewer than n+1 points.
    """
    settings = get_settings()
    budget = settings.sample_budget if sample_budget is None else sample_budget
    tol = settings.degeneracy_tolerance if tolerance is None else tolerance
    rng_seed = settings.sample_seed if seed is None else seed

    size = basis.dimension
    if len(grid) < size:
        raise DimensionError(
            f"Grid has {len(grid)} points; a degree {basis.degree} check needs at least {size}"
        )
    design = basis.matrix(grid)

    total = math.comb(len(grid), size)
    exhaustive = total <= budget
    if exhaustive:
        subsets = np.array(list(itertools.combinations(range(len(grid)), size)), dtype=int)
    else:
        rng = np.random.default_rng(rng_seed)
        seen: set[tuple[int, ...]] = set()
        drawn: list[tuple[int, ...]] = []
        for _ in range(4 * budget):
            subset = tuple(int(i) for i in np.sort(rng.choice(len(grid), size=size, replace=False)))
            if subset not in seen:
                seen.add(subset)
                drawn.append(subset)
                if len(drawn) == budget:
                    break
        subsets = np.array(drawn, dtype=int)

    scaled = _scaled_determinants(design, subsets)
    failing = np.flatnonzero(scaled < tol)
    smallest = float(scaled.min()) if scaled.size else math.inf
    if failing.size:
        witness = tuple(int(i) for i in subsets[failing[0]])
        logger.debug(f"Chebyshev-system check failed at nodes {witness} (scaled det {smallest:.3e})")
        return ChebyshevSystemVerdict(False, witness, len(subsets), exhaustive, smallest)
    return ChebyshevSystemVerdict(True, None, len(subsets), exhaustive, smallest)
