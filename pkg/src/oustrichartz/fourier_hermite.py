"""Fourier-Hermite transform on ``R^n`` and on ``(-pi, pi) x R^n``.

Conventions.  Space-time inner products use ``dt x gamma_n(dx)``.  The
*restriction* ``R_S g = {int int g h_mu e^{i nu t} gamma_n(dx) dt}`` and the
*extension* ``E_S c = sum c(mu, nu) h_mu e^{-i nu t}`` are mutually adjoint and
carry no normalisation, so ``E_S^* E_S = 2 pi Id`` and
``T_S^2 = 2 pi T_S``.  The unitary transform pair (``spacetime_transform`` /
``spacetime_inverse``) divides both by ``sqrt(2 pi)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import BudgetExceededError, DimensionMismatchError, ResolutionError, SurfaceError
from .hermite_core import (
    QuadratureGrid,
    SpectralField,
    basis_size,
    multi_indices,
)

DEFAULT_MATRIX_BUDGET = 2000


@dataclass(frozen=True)
class TimeGrid:
    """Uniform midpoint grid on ``(-pi, pi)`` (endpoints excluded).

    The rule integrates ``e^{ikt}`` exactly for ``|k| < size``.
    """

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ResolutionError(f"time grid needs at least one point, got {self.size}")

    @property
    def step(self) -> float:
        return 2.0 * math.pi / self.size

    @property
    def points(self) -> np.ndarray:
        return -math.pi + (np.arange(self.size) + 0.5) * self.step

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.size, self.step)


def forward_transform(values, grid: QuadratureGrid, degree: int) -> SpectralField:
    """``f_hat(mu) = sum_i w_i f(x_i) h_mu(x_i)`` for ``|mu| <= degree``."""
    grid.require_degree(degree)
    values = np.asarray(values)
    if values.shape[-1] != grid.size:
        raise DimensionMismatchError(f"expected {grid.size} samples, got {values.shape[-1]}")
    if not np.all(np.isfinite(values)):
        raise ResolutionError("samples must be finite")
    coeffs = grid.basis(degree) @ (grid.weights * values)
    return SpectralField(grid.dimension, degree, coeffs)


def inverse_transform(c: SpectralField, grid: QuadratureGrid) -> np.ndarray:
    """``f(x) = sum_mu c_mu h_mu(x)`` at the nodes of ``grid``."""
    if c.dimension != grid.dimension:
        raise DimensionMismatchError("field and grid dimensions differ")
    return c.on_grid(grid)


@dataclass(frozen=True, eq=False)
class DiscreteSurface:
    """Subset of ``N_0^n x Z`` given by a membership predicate on ``(mu, nu)``.

    The canonical listing holds members with ``|mu| <= degree`` and
    ``|nu| <= max_frequency`` sorted lexicographically in ``(nu, mu)``.
    """

    dimension: int
    predicate: Callable[[tuple, int], bool]
    degree: int
    max_frequency: int
    name: str = "custom"

    @classmethod
    def ou_surface(cls, n: int, degree: int) -> "DiscreteSurface":
        """``{nu = |mu|}``, whose extension operator is ``e^{-itL}``."""
        return cls(n, lambda mu, nu: nu == sum(mu), degree, degree, "nu=|mu|")

    @classmethod
    def linear(cls, n: int, a: Iterable[int], b: int, c: int, degree: int,
               max_frequency: int) -> "DiscreteSurface":
        """Zero set of the degree-one polynomial ``a.mu + b nu + c``."""
        a = tuple(int(v) for v in a)
        if len(a) != n:
            raise DimensionMismatchError(f"coefficient vector has length {len(a)}, expected {n}")
        return cls(
            n,
            lambda mu, nu: sum(ai * mi for ai, mi in zip(a, mu)) + b * nu + c == 0,
            degree,
            max_frequency,
            f"{a}.mu + {b} nu + {c} = 0",
        )

    @classmethod
    def rectangle(cls, n: int, degree: int, max_frequency: int) -> "DiscreteSurface":
        return cls(n, lambda mu, nu: True, degree, max_frequency, "all")

    def members(self) -> list[tuple[tuple[int, ...], int]]:
        alpha = multi_indices(self.dimension, self.degree)
        out = []
        for nu in range(-self.max_frequency, self.max_frequency + 1):
            for mu in sorted(tuple(int(v) for v in a) for a in alpha):
                if self.predicate(mu, nu):
                    out.append((mu, nu))
        return out

    def contains(self, mu, nu) -> bool:
        mu = tuple(int(v) for v in mu)
        return (
            len(mu) == self.dimension
            and sum(mu) <= self.degree
            and abs(nu) <= self.max_frequency
            and bool(self.predicate(mu, int(nu)))
        )

    def listing_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        mem = self.members()
        mu = np.array([m for m, _ in mem], dtype=np.int64).reshape(-1, self.dimension)
        nu = np.array([v for _, v in mem], dtype=np.int64)
        return mu, nu


@dataclass(eq=False)
class SpaceTimeField:
    """Samples ``g(t_j, x_i)`` with shape ``(time_grid.size, grid.size)``."""

    time_grid: TimeGrid
    grid: QuadratureGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.time_grid.size, self.grid.size):
            raise DimensionMismatchError(
                f"samples have shape {self.values.shape}, expected "
                f"{(self.time_grid.size, self.grid.size)}"
            )

    @property
    def measure(self) -> np.ndarray:
        """Cell weights ``dt * w_i`` in the same flattened order as the samples."""
        return np.outer(self.time_grid.weights, self.grid.weights)

    def inner(self, other: "SpaceTimeField") -> complex:
        return complex(np.sum(self.measure * np.conj(self.values) * other.values))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.measure * np.abs(self.values) ** 2)))


@dataclass(eq=False)
class CoefficientTable:
    """``f_hat(mu, nu)`` for ``|mu| <= degree`` and ``|nu| <= max_frequency``;
    ``values[b, k]`` pairs basis index ``b`` with ``nu = k - max_frequency``."""

    dimension: int
    degree: int
    max_frequency: int
    values: np.ndarray

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.max_frequency, self.max_frequency + 1)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2)))

    def at(self, mu, nu) -> complex:
        field_ = SpectralField.zeros(self.dimension, self.degree)
        return complex(self.values[field_.position(mu), nu + self.max_frequency])


def _check_frequency_resolution(time_grid: TimeGrid, max_frequency: int) -> None:
    if time_grid.size < 2 * max_frequency + 2:
        raise ResolutionError(
            f"time grid of {time_grid.size} points aliases frequencies up to "
            f"{max_frequency}; need at least {2 * max_frequency + 2}"
        )


def _characters(time_grid: TimeGrid, nu) -> np.ndarray:
    """``e^{-i nu t_j}``, shape ``(time_grid.size, len(nu))``."""
    return np.exp(-1j * np.outer(time_grid.points, np.asarray(nu)))


def restriction_table(g: SpaceTimeField, degree: int, max_frequency: int) -> CoefficientTable:
    """Unnormalised ``int int g h_mu e^{i nu t} gamma_n(dx) dt`` on the rectangle."""
    _check_frequency_resolution(g.time_grid, max_frequency)
    g.grid.require_degree(degree)
    nus = np.arange(-max_frequency, max_frequency + 1)
    spatial = (g.values * g.grid.weights) @ g.grid.basis(degree).T  # (M_t, basis)
    table = (np.conj(_characters(g.time_grid, nus)) * g.time_grid.step).T @ spatial
    return CoefficientTable(g.grid.dimension, degree, max_frequency, table.T)


def spacetime_transform(g: SpaceTimeField, degree: int, max_frequency: int) -> CoefficientTable:
    """Unitary space-time coefficients ``(2 pi)^{-1/2} R g`` on the rectangle."""
    table = restriction_table(g, degree, max_frequency)
    table.values = table.values / math.sqrt(2.0 * math.pi)
    return table


def spacetime_inverse(table: CoefficientTable, time_grid: TimeGrid,
                      grid: QuadratureGrid) -> SpaceTimeField:
    """Inverse of :func:`spacetime_transform`."""
    basis = grid.basis(table.degree)
    chars = _characters(time_grid, table.frequencies)
    values = chars @ table.values.T @ basis / math.sqrt(2.0 * math.pi)
    return SpaceTimeField(time_grid, grid, values)


def surface_coefficients(c, surface: DiscreteSurface) -> np.ndarray:
    """Coefficient vector aligned with ``surface.members()``.

    ``c`` is either such a vector or a mapping ``{(mu, nu): value}``; mapping
    keys off the surface listing are rejected.
    """
    members = surface.members()
    if isinstance(c, Mapping):
        pos = {m: k for k, m in enumerate(members)}
        out = np.zeros(len(members), dtype=complex)
        for (mu, nu), val in c.items():
            key = (tuple(int(v) for v in mu), int(nu))
            if key not in pos:
                raise SurfaceError(f"coefficient at {key} is outside the surface listing")
            out[pos[key]] = val
        return out
    c = np.asarray(c, dtype=complex).reshape(-1)
    if c.size != len(members):
        raise SurfaceError(f"expected {len(members)} surface coefficients, got {c.size}")
    return c


def extension_matrix(surface: DiscreteSurface, time_grid: TimeGrid,
                     grid: QuadratureGrid) -> np.ndarray:
    """Samples of ``h_mu(x_i) e^{-i nu t_j}``; rows are flattened ``(j, i)``."""
    mu, nu = surface.listing_arrays()
    full = grid.basis(surface.degree)
    position = {tuple(a): b for b, a in enumerate(multi_indices(surface.dimension, surface.degree).tolist())}
    rows = full[[position[tuple(m)] for m in mu.tolist()]]  # (|S|, N_x)
    chars = _characters(time_grid, nu)  # (M_t, |S|)
    return (chars[:, None, :] * rows.T[None, :, :]).reshape(-1, len(nu))


def extension_operator(c, surface: DiscreteSurface, time_grid: TimeGrid,
                       grid: QuadratureGrid) -> SpaceTimeField:
    """``E_S c (t, x) = sum_{(mu, nu) in S} c(mu, nu) h_mu(x) e^{-i nu t}``."""
    vec = surface_coefficients(c, surface)
    values = extension_matrix(surface, time_grid, grid) @ vec
    return SpaceTimeField(time_grid, grid, values.reshape(time_grid.size, grid.size))


def restriction_operator(g: SpaceTimeField, surface: DiscreteSurface) -> np.ndarray:
    """``R_S g``: the adjoint of :func:`extension_operator`."""
    _check_frequency_resolution(g.time_grid, surface.max_frequency)
    g.grid.require_degree(surface.degree)
    e = extension_matrix(surface, g.time_grid, g.grid)
    weighted = (g.measure * g.values).reshape(-1)
    return np.conj(e).T @ weighted


def assemble_TS(surface: DiscreteSurface, time_grid: TimeGrid, grid: QuadratureGrid,
                budget: int = DEFAULT_MATRIX_BUDGET):
    """Weight-conjugated matrix of ``T_S = E_S E_S^*`` on ``L^2(dt x gamma_n)``.

    Returns a :class:`~oustrichartz.schatten.OperatorMatrix`, whose Euclidean
    singular values are those of the discretised operator.
    """
    from .schatten import OperatorMatrix

    _check_frequency_resolution(time_grid, surface.max_frequency)
    grid.require_degree(surface.degree)
    dim = time_grid.size * grid.size
    if dim > budget:
        raise BudgetExceededError(f"T_S would be {dim} x {dim}; budget is {budget}")
    omega = np.outer(time_grid.weights, grid.weights).reshape(-1)
    e_hat = np.sqrt(omega)[:, None] * extension_matrix(surface, time_grid, grid)
    matrix = e_hat @ np.conj(e_hat).T
    matrix = 0.5 * (matrix + np.conj(matrix).T)
    return OperatorMatrix(
        matrix,
        omega,
        metadata={
            "surface": surface.name,
            "surface_size": len(surface.members()),
            "time_steps": time_grid.size,
            **grid.metadata(),
        },
    )


def surface_from_field(u: SpectralField, surface: DiscreteSurface | None = None) -> np.ndarray:
    """Coefficients ``c(mu, |mu|) = u_hat(mu)`` on ``{nu = |mu|}``."""
    surface = surface or DiscreteSurface.ou_surface(u.dimension, u.degree)
    members = surface.members()
    out = np.zeros(len(members), dtype=complex)
    for k, (mu, nu) in enumerate(members):
        if nu != sum(mu):
            raise SurfaceError("surface_from_field needs the surface nu = |mu|")
        out[k] = u.coefficient(mu)
    return out


def coefficients_to_json(c, surface: DiscreteSurface) -> str:
    vec = surface_coefficients(c, surface)
    rows = [
        {"mu": list(mu), "nu": int(nu), "re": float(v.real), "im": float(v.imag)}
        for (mu, nu), v in zip(surface.members(), vec)
    ]
    return json.dumps(rows, sort_keys=True)


def coefficients_from_json(text: str) -> dict:
    """Mapping ``{(mu, nu): value}`` read from :func:`coefficients_to_json` output."""
    out = {}
    for row in json.loads(text):
        out[(tuple(int(v) for v in row["mu"]), int(row["nu"]))] = complex(row["re"], row["im"])
    return out


__all__ = [
    "TimeGrid",
    "DiscreteSurface",
    "SpaceTimeField",
    "CoefficientTable",
    "forward_transform",
    "inverse_transform",
    "restriction_table",
    "spacetime_transform",
    "spacetime_inverse",
    "surface_coefficients",
    "extension_matrix",
    "extension_operator",
    "restriction_operator",
    "assemble_TS",
    "surface_from_field",
    "coefficients_to_json",
    "coefficients_from_json",
    "basis_size",
]
