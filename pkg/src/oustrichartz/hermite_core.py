"""Normalised Hermite polynomials and Gauss-Hermite quadrature for the
Gaussian probability measure ``pi^{-n/2} exp(-|x|^2) dx``.

Everything downstream (propagators, transforms, densities) is expressed
through the tables built here, so the recurrence and the quadrature rule are
the two numerically load-bearing pieces of the package.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import BudgetExceededError, DimensionMismatchError, DomainError, ResolutionError

#: Off-grid evaluation is refused beyond this radius.
X_LIMIT = 10.0
DEFAULT_DEGREE = 40
#: Golub-Welsch plus Newton polishing is validated up to this many nodes.
MAX_NODES = 200
DEFAULT_POINT_BUDGET = 250_000


@dataclass(frozen=True)
class MultiIndex:
    """Multi-index ``alpha`` in ``N_0^n``; ``order()`` is the eigenvalue of
    the Ornstein-Uhlenbeck operator on ``h_alpha``."""

    components: tuple[int, ...]

    def __post_init__(self):
        comps = tuple(int(c) for c in self.components)
        if any(c < 0 for c in comps):
            raise DomainError(f"multi-index components must be >= 0, got {comps}")
        object.__setattr__(self, "components", comps)

    def order(self) -> int:
        return sum(self.components)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)


@lru_cache(maxsize=64)
def _multi_indices_cached(n: int, degree: int) -> np.ndarray:
    idx = [a for a in itertools.product(range(degree + 1), repeat=n) if sum(a) <= degree]
    idx.sort(key=lambda a: (sum(a), a))
    out = np.array(idx, dtype=np.int64).reshape(-1, n)
    out.setflags(write=False)
    return out


def multi_indices(n: int, degree: int) -> np.ndarray:
    """All ``alpha`` with ``|alpha| <= degree`` as an ``(count, n)`` int array,
    graded by total order and lexicographic within an order."""
    if n < 1 or degree < 0:
        raise DomainError(f"need n >= 1 and degree >= 0, got n={n}, degree={degree}")
    return _multi_indices_cached(int(n), int(degree))


def basis_size(n: int, degree: int) -> int:
    return math.comb(degree + n, n)


def hermite_table(degree: int, x, check_range: bool = True) -> np.ndarray:
    """Rows ``h_0(x), ..., h_degree(x)`` from the normalised recurrence.

    ``h_{k+1} = sqrt(2/(k+1)) x h_k - sqrt(k/(k+1)) h_{k-1}``. The result has
    shape ``(degree + 1,) + np.shape(x)``.
    """
    if degree < 0:
        raise DomainError(f"degree must be >= 0, got {degree}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("Hermite evaluation needs finite abscissae")
    if check_range and x.size and np.max(np.abs(x)) > X_LIMIT:
        raise DomainError(
            f"off-grid Hermite evaluation limited to |x| <= {X_LIMIT}, got {np.max(np.abs(x)):.3g}"
        )
    out = np.empty((degree + 1,) + x.shape)
    out[0] = 1.0
    if degree >= 1:
        out[1] = math.sqrt(2.0) * x
    for k in range(1, degree):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def hermite_eval(k: int, x: float) -> float:
    """Normalised Hermite polynomial ``h_k(x) = (2^k k!)^{-1/2} H_k(x)``."""
    return float(hermite_table(int(k), float(x))[k])


def multi_hermite_eval(alpha, x) -> float:
    """Tensor-product polynomial ``prod_j h_{alpha_j}(x_j)``."""
    alpha = alpha if isinstance(alpha, MultiIndex) else MultiIndex(tuple(alpha))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if len(alpha) != x.size:
        raise DimensionMismatchError(f"multi-index has length {len(alpha)}, point has {x.size}")
    val = 1.0
    for a, xj in zip(alpha, x):
        val *= hermite_table(a, xj)[a]
    return float(val)


def basis_on_points(n: int, degree: int, points, check_range: bool = True) -> np.ndarray:
    """Matrix ``B[b, i] = h_{alpha_b}(points_i)`` for the graded listing of
    ``multi_indices(n, degree)``; ``points`` has shape ``(N, n)``."""
    points = np.asarray(points, dtype=float).reshape(-1, n) if n > 1 else np.asarray(
        points, dtype=float
    ).reshape(-1, 1)
    if points.shape[1] != n:
        raise DimensionMismatchError(f"points have dimension {points.shape[1]}, expected {n}")
    alpha = multi_indices(n, degree)
    out = np.ones((alpha.shape[0], points.shape[0]))
    for j in range(n):
        table = hermite_table(degree, points[:, j], check_range=check_range)
        out *= table[alpha[:, j]]
    return out


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Tensor Gauss-Hermite rule normalised to the Gaussian probability measure.

    ``nodes`` has shape ``(m**n, n)`` in C order (last axis fastest) and the
    weight of a node is the product of its one-dimensional weights.
    """

    dimension: int
    axis_nodes: np.ndarray
    axis_weights: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    _basis_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def nodes_per_axis(self) -> int:
        return self.axis_nodes.size

    @property
    def size(self) -> int:
        return self.weights.size

    def integrate(self, values) -> complex | float:
        return np.tensordot(np.asarray(values), self.weights, axes=([-1], [0]))

    def basis(self, degree: int) -> np.ndarray:
        """``h_mu`` at every node, shape ``(basis_size, size)``; cached."""
        if degree not in self._basis_cache:
            table = hermite_table(degree, self.axis_nodes, check_range=False)
            alpha = multi_indices(self.dimension, degree)
            axis_idx = np.indices((self.nodes_per_axis,) * self.dimension).reshape(
                self.dimension, -1
            )
            out = np.ones((alpha.shape[0], self.size))
            for j in range(self.dimension):
                out *= table[alpha[:, j]][:, axis_idx[j]]
            out.setflags(write=False)
            self._basis_cache[degree] = out
        return self._basis_cache[degree]

    def require_degree(self, degree: int) -> None:
        """Orthonormality up to ``degree`` needs ``degree + 1 <= m``."""
        if degree + 1 > self.nodes_per_axis:
            raise ResolutionError(
                f"degree {degree} needs at least {degree + 1} nodes per axis, "
                f"grid has {self.nodes_per_axis}"
            )

    def metadata(self) -> dict:
        return {"dimension": self.dimension, "nodes_per_axis": self.nodes_per_axis}


@lru_cache(maxsize=32)
def _gauss_hermite_1d(m: int) -> tuple[np.ndarray, np.ndarray]:
    if m == 1:
        return np.zeros(1), np.ones(1)
    # Golub-Welsch: eigenvalues of the Jacobi matrix of the orthonormal recurrence.
    off = np.sqrt(np.arange(1, m) / 2.0)
    nodes = eigh_tridiagonal(np.zeros(m), off, eigvals_only=True)
    # h_m' = sqrt(2m) h_{m-1}
    for _ in range(2):
        table = hermite_table(m, nodes, check_range=False)
        nodes = nodes - table[m] / (math.sqrt(2.0 * m) * table[m - 1])
    nodes = 0.5 * (nodes - nodes[::-1])
    # Christoffel numbers keep full relative accuracy for the tiny tail
    # weights, unlike squared eigenvector components.
    table = hermite_table(m - 1, nodes, check_range=False)
    weights = 1.0 / np.sum(table**2, axis=0)
    weights = 0.5 * (weights + weights[::-1])
    weights /= weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_hermite_rule(m: int) -> QuadratureGrid:
    """One-dimensional ``m``-point rule, exact for polynomials of degree
    ``<= 2m - 1`` against the Gaussian probability measure."""
    if m < 1:
        raise DomainError(f"need at least one node, got m={m}")
    if m > MAX_NODES:
        raise BudgetExceededError(f"m={m} exceeds the validated maximum of {MAX_NODES} nodes")
    nodes, weights = _gauss_hermite_1d(int(m))
    return QuadratureGrid(1, nodes, weights, nodes.reshape(-1, 1), weights)


def tensor_grid(n: int, m: int, budget: int = DEFAULT_POINT_BUDGET) -> QuadratureGrid:
    """``m**n``-point product rule on ``R^n``."""
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    if m < 1:
        raise DomainError(f"need at least one node, got m={m}")
    if m**n > budget:
        raise BudgetExceededError(f"{m}^{n} = {m**n} nodes exceeds budget {budget}")
    base = gauss_hermite_rule(m)
    if n == 1:
        return base
    x, w = base.axis_nodes, base.axis_weights
    mesh = np.meshgrid(*([x] * n), indexing="ij")
    nodes = np.stack([g.reshape(-1) for g in mesh], axis=1)
    weights = np.ones(1)
    for _ in range(n):
        weights = np.multiply.outer(weights, w).reshape(-1)
    return QuadratureGrid(n, x, w, nodes, weights)


@dataclass(eq=False)
class SpectralField:
    """Function on ``R^n`` given by Hermite coefficients for ``|mu| <= degree``.

    Coefficients follow the order of ``multi_indices(dimension, degree)``. By
    orthonormality the squared ``L^2(gamma_n)`` norm is ``sum |c_mu|^2``.
    """

    dimension: int
    degree: int
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex).reshape(-1)
        expected = basis_size(self.dimension, self.degree)
        if self.coefficients.size != expected:
            raise DimensionMismatchError(
                f"expected {expected} coefficients for n={self.dimension}, "
                f"K={self.degree}; got {self.coefficients.size}"
            )

    @classmethod
    def zeros(cls, n: int, degree: int) -> "SpectralField":
        return cls(n, degree, np.zeros(basis_size(n, degree), dtype=complex))

    @classmethod
    def basis_function(cls, alpha, degree: int | None = None) -> "SpectralField":
        alpha = alpha if isinstance(alpha, MultiIndex) else MultiIndex(tuple(alpha))
        degree = alpha.order() if degree is None else degree
        field_ = cls.zeros(len(alpha), degree)
        field_.coefficients[field_.position(alpha)] = 1.0
        return field_

    @property
    def indices(self) -> np.ndarray:
        return multi_indices(self.dimension, self.degree)

    @property
    def orders(self) -> np.ndarray:
        return self.indices.sum(axis=1)

    def position(self, alpha) -> int:
        comps = tuple(alpha)
        if len(comps) != self.dimension:
            raise DimensionMismatchError(f"multi-index {comps} has wrong length")
        hits = np.nonzero(np.all(self.indices == np.array(comps), axis=1))[0]
        if hits.size == 0:
            raise DomainError(f"multi-index {comps} exceeds degree {self.degree}")
        return int(hits[0])

    def coefficient(self, alpha) -> complex:
        return complex(self.coefficients[self.position(alpha)])

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coefficients) ** 2)))

    def evaluate(self, points) -> np.ndarray:
        """Values at arbitrary points of shape ``(N, n)`` (``|x| <= X_LIMIT``)."""
        return self.coefficients @ basis_on_points(self.dimension, self.degree, points)

    def on_grid(self, grid: QuadratureGrid) -> np.ndarray:
        return self.coefficients @ grid.basis(self.degree)

    def copy(self) -> "SpectralField":
        return SpectralField(self.dimension, self.degree, self.coefficients.copy())
