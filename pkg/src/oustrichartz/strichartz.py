"""Densities of orthonormal systems under ``e^{-itL}``, their mixed norms, and
Strichartz-ratio experiments.

For an orthonormal system ``(u_j)`` in ``L^2(gamma_n)`` and occupations
``n_j`` the density is ``rho(t, x) = sum_j n_j |e^{-itL} u_j(x)|^2``; the
Strichartz ratio divides its ``L_t^p L_x^q`` norm by the
``l^{2q/(q+1)}`` norm of the occupations.  The coherent-state optimality
construction lives in :mod:`oustrichartz.coherent` and is re-exported here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .coherent import (  # noqa: F401  (re-exported)
    CoherentCrossCheck,
    CoherentParams,
    OptimalityReport,
    berezin_lieb_bound,
    coherent_state,
    cross_validate_coherent,
    gamma0_density_closed_form,
    gamma0_density_quadrature,
    gamma0_eigenvalues,
    optimality_scan,
    propagated_coherent_modulus,
    trace_N,
    trace_N_quadrature,
)
from .errors import DimensionMismatchError, DomainError, ExponentError
from .fourier_hermite import TimeGrid
from .hermite_core import MAX_NODES, QuadratureGrid, SpectralField, basis_size, multi_indices, tensor_grid
from .norms import mixed_lp

DEFAULT_TIME_STEPS = 512
ADMISSIBILITY_TOL = 1e-12


@dataclass(eq=False)
class OrthonormalSystem:
    """``J`` fields sharing ``(n, K)``; ``coefficients[:, j]`` holds ``u_j``."""

    dimension: int
    degree: int
    coefficients: np.ndarray
    _gram: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        if self.coefficients.ndim != 2 or self.coefficients.shape[0] != basis_size(
            self.dimension, self.degree
        ):
            raise DimensionMismatchError(
                f"coefficient matrix {self.coefficients.shape} does not match "
                f"basis size {basis_size(self.dimension, self.degree)}"
            )

    @classmethod
    def from_fields(cls, fields) -> "OrthonormalSystem":
        fields = list(fields)
        if not fields:
            raise DomainError("an orthonormal system needs at least one field")
        n, k = fields[0].dimension, fields[0].degree
        if any(f.dimension != n or f.degree != k for f in fields):
            raise DimensionMismatchError("all fields must share dimension and degree")
        return cls(n, k, np.stack([f.coefficients for f in fields], axis=1))

    @property
    def size(self) -> int:
        return self.coefficients.shape[1]

    @property
    def gram(self) -> np.ndarray:
        if self._gram is None:
            self._gram = np.conj(self.coefficients).T @ self.coefficients
        return self._gram

    def field(self, j: int) -> SpectralField:
        return SpectralField(self.dimension, self.degree, self.coefficients[:, j])

    def orthonormality_error(self) -> float:
        return float(np.max(np.abs(self.gram - np.eye(self.size))))

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.coefficients.imag == 0))


def make_orthonormal_system(J: int, K: int, n: int, seed: int, real: bool = False) -> OrthonormalSystem:
    """QR-orthonormalised Gaussian coefficients; deterministic in ``seed``."""
    d = basis_size(n, K)
    if J < 1 or J > d:
        raise DomainError(f"J={J} must lie in [1, {d}] for n={n}, K={K}")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, J))
    if not real:
        a = a + 1j * rng.standard_normal((d, J))
    q, r = np.linalg.qr(a)
    # fix the column signs/phases so the factorisation is unique
    q = q * (np.diag(r) / np.abs(np.diag(r)))[None, :]
    return OrthonormalSystem(n, K, q.real if real else q)


@dataclass(eq=False)
class DensityField:
    """``rho(t_j, x_i)`` on ``time_grid x grid``."""

    time_grid: TimeGrid
    grid: QuadratureGrid
    values: np.ndarray

    def mass(self) -> np.ndarray:
        """``int rho(t, .) d gamma_n`` for every time sample."""
        return self.values @ self.grid.weights

    def scaled(self, c: float) -> "DensityField":
        return DensityField(self.time_grid, self.grid, c * self.values)

    def __add__(self, other: "DensityField") -> "DensityField":
        return DensityField(self.time_grid, self.grid, self.values + other.values)

    def restrict_time(self, mask) -> tuple[np.ndarray, np.ndarray]:
        mask = np.asarray(mask, dtype=bool)
        return self.values[mask], self.time_grid.weights[mask]


def density(system: OrthonormalSystem, n_j, time_grid: TimeGrid, grid: QuadratureGrid) -> DensityField:
    """``sum_j n_j |e^{-itL} u_j|^2`` on the space-time grid."""
    n_j = np.asarray(n_j, dtype=float).reshape(-1)
    if n_j.size != system.size:
        raise DimensionMismatchError(f"{n_j.size} occupations for {system.size} functions")
    if grid.dimension != system.dimension:
        raise DimensionMismatchError("grid dimension differs from the system's")
    orders = multi_indices(system.dimension, system.degree).sum(axis=1)
    basis = grid.basis(system.degree)
    rho = np.zeros((time_grid.size, grid.size))
    for k, t in enumerate(time_grid.points):
        vals = (np.exp(-1j * t * orders)[:, None] * system.coefficients).T @ basis  # (J, N_x)
        rho[k] = n_j @ (vals.real**2 + vals.imag**2)
    return DensityField(time_grid, grid, rho)


def mixed_norm(rho: DensityField, p: float, q: float) -> float:
    """``(sum_j dt (sum_i w_i |rho|^q)^{p/q})^{1/p}``; ``inf`` is a grid max."""
    for name, e in (("p", p), ("q", q)):
        if not (e >= 1.0):
            raise ExponentError(f"{name} must be >= 1, got {e}")
    return mixed_lp(rho.values, rho.time_grid.weights, rho.grid.weights, p, q)


def half_time_norms(rho: DensityField, p: float, q: float) -> tuple[float, float]:
    """Mixed norms over ``(-pi, 0)`` and ``(0, pi)``."""
    t = rho.time_grid.points
    out = []
    for mask in (t < 0, t > 0):
        vals, tw = rho.restrict_time(mask)
        out.append(mixed_lp(vals, tw, rho.grid.weights, p, q))
    return out[0], out[1]


def schatten_exponent(q: float) -> float:
    """``2q/(q+1)``: the occupation exponent on the right of the estimate."""
    return 2.0 * q / (q + 1.0)


def check_admissible(n: int, p: float, q: float) -> None:
    """``2/p + n/q = n`` and ``1 <= q < (n+1)/(n-1)``."""
    if not (p >= 1.0 and q >= 1.0):
        raise ExponentError(f"need p, q >= 1, got p={p}, q={q}")
    lhs = (0.0 if math.isinf(p) else 2.0 / p) + (0.0 if math.isinf(q) else n / q)
    if abs(lhs - n) > ADMISSIBILITY_TOL:
        raise ExponentError(f"2/p + n/q = {lhs!r} differs from n = {n}")
    if n > 1 and not q < (n + 1) / (n - 1):
        raise ExponentError(f"q={q} outside [1, {(n + 1) / (n - 1):g}) for n={n}")


def occupation_norm(n_j, q: float) -> float:
    e = schatten_exponent(q)
    return float(np.sum(np.abs(np.asarray(n_j, dtype=float)) ** e) ** (1.0 / e))


@dataclass
class StrichartzReport:
    p: float
    q: float
    r: float
    mixed_norm: float
    schatten_norm: float
    ratio: float
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def enc(v):
            return v if math.isfinite(v) else str(v)

        return {
            "p": enc(self.p),
            "q": enc(self.q),
            "r": enc(self.r),
            "mixed_norm": enc(self.mixed_norm),
            "schatten_norm": enc(self.schatten_norm),
            "ratio": enc(self.ratio),
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def default_nodes(K: int) -> int:
    """Nodes per axis making ``|rho|^3`` (degree ``6K``) exactly integrable."""
    return min(3 * K + 10, MAX_NODES)


def strichartz_ratio(system: OrthonormalSystem, n_j, p: float, q: float,
                     time_grid: TimeGrid | None = None, grid: QuadratureGrid | None = None,
                     metadata: dict | None = None) -> StrichartzReport:
    """``||rho||_{L_t^p L_x^q} / ||n||_{l^{2q/(q+1)}}``."""
    check_admissible(system.dimension, p, q)
    time_grid = time_grid or TimeGrid(DEFAULT_TIME_STEPS)
    grid = grid or tensor_grid(system.dimension, default_nodes(system.degree))
    rho = density(system, n_j, time_grid, grid)
    num = mixed_norm(rho, p, q)
    den = occupation_norm(n_j, q)
    meta = {
        "n": system.dimension,
        "degree": system.degree,
        "J": system.size,
        "time_steps": time_grid.size,
        **grid.metadata(),
    }
    meta.update(metadata or {})
    return StrichartzReport(float(p), float(q), schatten_exponent(q), num, den, num / den, meta)


def occupation_profile(kind: str, J: int) -> np.ndarray:
    """``flat``: all ones; ``geometric``: ``2^{-j}``."""
    if kind == "flat":
        return np.ones(J)
    if kind == "geometric":
        return 2.0 ** -np.arange(J)
    raise DomainError(f"unknown occupation profile {kind!r}")


DEFAULT_J_LADDER = (1, 2, 4, 8, 16)


def ladder_degree(n: int, J_max: int) -> int:
    """Smallest ``K`` whose degree-``<= K`` space holds ``J_max`` functions."""
    K = 0
    while basis_size(n, K) < J_max:
        K += 1
    return K


def strichartz_ladder(n: int = 1, p: float = 3.0, q: float = 3.0, J_values=DEFAULT_J_LADDER,
                      profile: str = "flat", seed: int = 0, degree: int | None = None,
                      time_steps: int = DEFAULT_TIME_STEPS, nodes: int | None = None) -> list:
    """Ratios over a ``J`` ladder; system ``J`` is drawn with seed ``seed + J``."""
    check_admissible(n, p, q)
    degree = ladder_degree(n, max(J_values)) if degree is None else degree
    time_grid = TimeGrid(time_steps)
    grid = tensor_grid(n, nodes or default_nodes(degree))
    out = []
    for J in J_values:
        system = make_orthonormal_system(J, degree, n, seed + J)
        out.append(
            strichartz_ratio(
                system,
                occupation_profile(profile, J),
                p,
                q,
                time_grid,
                grid,
                {"profile": profile, "seed": seed + J},
            )
        )
    return out


def ladder_spread(reports) -> float:
    ratios = np.array([r.ratio for r in reports])
    return float(ratios.max() / ratios.min())


__all__ = [
    "OrthonormalSystem",
    "DensityField",
    "StrichartzReport",
    "make_orthonormal_system",
    "density",
    "mixed_norm",
    "half_time_norms",
    "schatten_exponent",
    "check_admissible",
    "occupation_norm",
    "strichartz_ratio",
    "occupation_profile",
    "strichartz_ladder",
    "ladder_spread",
    "ladder_degree",
    "default_nodes",
    "CoherentParams",
    "CoherentCrossCheck",
    "OptimalityReport",
    "coherent_state",
    "propagated_coherent_modulus",
    "cross_validate_coherent",
    "gamma0_density_closed_form",
    "gamma0_density_quadrature",
    "gamma0_eigenvalues",
    "trace_N",
    "trace_N_quadrature",
    "berezin_lieb_bound",
    "optimality_scan",
]
