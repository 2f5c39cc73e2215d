"""Operators on discretised ``L^2``, singular values and Schatten norms, and
a numerical check of the duality between Schatten bounds on ``W A A^* W``
and mixed-norm bounds on densities of orthonormal systems.

Discretisation rule: an operator with kernel ``k(u, v)`` against a measure
with quadrature weights ``omega`` is stored as ``sqrt(omega_u) k(u, v)
sqrt(omega_v)``, so Euclidean singular values are ``L^2`` singular values.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceededError, DimensionMismatchError, DomainError, ExponentError
from .fourier_hermite import DEFAULT_MATRIX_BUDGET, TimeGrid
from .hermite_core import QuadratureGrid, multi_indices
from .norms import dual_exponent, holder_extremiser, mixed_lp


@dataclass(eq=False)
class OperatorMatrix:
    """Weight-conjugated matrix of an operator on a weighted ``L^2``."""

    matrix: np.ndarray
    weights: np.ndarray | None = None
    weight_conjugated: bool = True
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.ndim != 2:
            raise DimensionMismatchError("operator matrix must be two-dimensional")
        if not self.weight_conjugated:
            raise DomainError("only weight-conjugated matrices represent L^2 operators faithfully")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float).reshape(-1)

    @classmethod
    def from_kernel(cls, kernel, weights, metadata=None) -> "OperatorMatrix":
        """Build from kernel samples ``k(u_a, u_b)`` against weights ``omega``."""
        k = np.asarray(kernel, dtype=complex)
        w = np.asarray(weights, dtype=float).reshape(-1)
        if k.shape != (w.size, w.size):
            raise DimensionMismatchError(f"kernel shape {k.shape} does not match {w.size} weights")
        s = np.sqrt(w)
        return cls(s[:, None] * k * s[None, :], w, True, dict(metadata or {}))

    @property
    def shape(self):
        return self.matrix.shape

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.matrix @ other.matrix, self.weights, True, dict(self.metadata))

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(np.conj(self.matrix).T, self.weights, True, dict(self.metadata))


def _raw(a) -> np.ndarray:
    return a.matrix if isinstance(a, OperatorMatrix) else np.asarray(a, dtype=complex)


def discretize_multiplication(W, weights=None) -> OperatorMatrix:
    """Multiplication by ``W``: diagonal, hence unchanged by conjugation."""
    w = np.asarray(W, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(w)):
        raise DomainError("multiplier must be finite on the grid")
    return OperatorMatrix(np.diag(w), weights, True, {"kind": "multiplication"})


def singular_values(a, budget: int = DEFAULT_MATRIX_BUDGET) -> np.ndarray:
    """Singular values in descending order (LAPACK divide-and-conquer SVD)."""
    m = _raw(a)
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    if max(m.shape) > budget:
        raise BudgetExceededError(f"matrix of shape {m.shape} exceeds budget {budget}")
    if m.size == 0:
        return np.zeros(0)
    return np.linalg.svd(m, compute_uv=False)


def norm_from_singular_values(s, r: float) -> float:
    r = float(r)
    if not (r >= 1.0):
        raise ExponentError(f"Schatten exponent must be >= 1, got {r}")
    s = np.asarray(s, dtype=float)
    if s.size == 0:
        return 0.0
    top = float(np.max(s))
    if math.isinf(r) or top == 0.0:
        return top
    return top * float(np.sum((s / top) ** r)) ** (1.0 / r)


def schatten_norm(a, r: float) -> float:
    """``(sum s_k^r)^{1/r}``; ``r = inf`` gives the operator norm."""
    if not (float(r) >= 1.0):
        raise ExponentError(f"Schatten exponent must be >= 1, got {r}")
    return norm_from_singular_values(singular_values(a), r)


@dataclass
class SchattenReport:
    r: float
    singular_values: np.ndarray
    norm: float
    metadata: dict = field(default_factory=dict)

    @classmethod
    def of(cls, a, r: float) -> "SchattenReport":
        s = singular_values(a)
        meta = dict(a.metadata) if isinstance(a, OperatorMatrix) else {}
        return cls(float(r), s, norm_from_singular_values(s, r), meta)

    def to_dict(self) -> dict:
        return {
            "r": "inf" if math.isinf(self.r) else self.r,
            "norm": self.norm,
            "singular_values": [float(v) for v in self.singular_values],
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "singular_value"])
        for k, v in enumerate(self.singular_values):
            writer.writerow([k, repr(float(v))])
        return buf.getvalue()


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Gaussian matrix with the
    phases of ``diag(R)`` removed."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph[None, :]


def random_isometry(d: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """``d x k`` matrix with orthonormal columns."""
    if k > d:
        raise DomainError(f"cannot fit {k} orthonormal vectors in dimension {d}")
    z = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    q, _ = np.linalg.qr(z)
    return q


@dataclass(eq=False)
class SynthesisOperator:
    """Map from ``l^2`` coefficients to space-time samples.

    ``samples[(j, i), b]`` is the image of the ``b``-th basis vector at
    ``(t_j, x_i)``; ``time_weights`` and ``space_weights`` give the measure.
    """

    samples: np.ndarray
    time_weights: np.ndarray
    space_weights: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        expected = self.time_weights.size * self.space_weights.size
        if self.samples.shape[0] != expected:
            raise DimensionMismatchError(
                f"{self.samples.shape[0]} sample rows, expected {expected}"
            )

    @property
    def omega(self) -> np.ndarray:
        return np.outer(self.time_weights, self.space_weights).reshape(-1)

    @property
    def domain_dim(self) -> int:
        return self.samples.shape[1]

    def weighted(self) -> np.ndarray:
        """``sqrt(omega) A``: Euclidean norms become ``L^2`` norms."""
        return np.sqrt(self.omega)[:, None] * self.samples

    def apply(self, coeffs) -> np.ndarray:
        """Image of coefficient vectors (columns) with shape ``(time, space, k)``."""
        out = self.samples @ np.asarray(coeffs, dtype=complex)
        return out.reshape(self.time_weights.size, self.space_weights.size, -1)


def propagator_synthesis(degree: int, time_grid: TimeGrid, grid: QuadratureGrid,
                         budget: int = DEFAULT_MATRIX_BUDGET) -> SynthesisOperator:
    """``c -> e^{-itL} sum_mu c_mu h_mu`` sampled on ``time_grid x grid``."""
    rows = time_grid.size * grid.size
    if rows > budget:
        raise BudgetExceededError(f"{rows} space-time samples exceed budget {budget}")
    orders = multi_indices(grid.dimension, degree).sum(axis=1)
    phases = np.exp(-1j * np.outer(time_grid.points, orders))  # (M_t, d)
    basis = grid.basis(degree).T  # (N_x, d)
    samples = (phases[:, None, :] * basis[None, :, :]).reshape(rows, -1)
    return SynthesisOperator(
        samples,
        time_grid.weights,
        grid.weights,
        {"degree": degree, "time_steps": time_grid.size, **grid.metadata()},
    )


def sandwich_schatten_norm(op: SynthesisOperator, W, alpha: float) -> float:
    """``||W A A^* conj(W)||_{G^alpha}`` computed as ``||W A||_{G^{2 alpha}}^2``.

    ``W A A^* W^*`` and ``(W A)^* (W A)`` share their nonzero spectrum, and
    the second factor stays ``D x d`` instead of ``D x D``.
    """
    x = np.asarray(W, dtype=complex).reshape(-1)[:, None] * op.weighted()
    s = np.linalg.svd(x, compute_uv=False)
    return norm_from_singular_values(s, 2.0 * alpha) ** 2


def _duality_exponents(p: float, q: float):
    """Exponents ``(time, space)`` for ``W`` and for the density."""
    for name, val in (("p", p), ("q", q)):
        if not (1.0 <= val <= 2.0):
            raise ExponentError(
                f"{name}={val} outside [1, 2]: dual exponent 2{name}/(2-{name}) is undefined"
            )
    w_time = math.inf if q == 2.0 else 2.0 * q / (2.0 - q)
    w_space = math.inf if p == 2.0 else 2.0 * p / (2.0 - p)
    rho_time = dual_exponent(q) / 2.0
    rho_space = dual_exponent(p) / 2.0
    return (w_time, w_space), (rho_time, rho_space)


@dataclass
class DualityTrial:
    trial: int
    systems: int
    constant_random_w: float
    constant_dual_w: float
    density_constant: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class DualityReport:
    alpha: float
    p: float
    q: float
    trials: list
    constant: float
    constant_random_only: float
    transferred_constant: float
    violations: int
    violations_random_only: int
    slack: float
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "p": self.p,
            "q": self.q,
            "constant": self.constant,
            "constant_random_only": self.constant_random_only,
            "transferred_constant": self.transferred_constant,
            "violations": self.violations,
            "violations_random_only": self.violations_random_only,
            "slack": self.slack,
            "passed": self.passed,
            "trials": [t.to_dict() for t in self.trials],
            "metadata": self.metadata,
        }


def density_of(op: SynthesisOperator, system: np.ndarray, occupations) -> np.ndarray:
    """``sum_j n_j |A f_j|^2`` with shape ``(time, space)``; ``system`` holds
    the coefficient vectors ``f_j`` as columns."""
    images = op.apply(system)
    return np.real(np.abs(images) ** 2 @ np.asarray(occupations, dtype=float))


def duality_check(op: SynthesisOperator, alpha: float, p: float, q: float,
                  trials: int = 20, seed: int = 0, slack: float = 0.05) -> DualityReport:
    """Empirical constants of both sides of the duality principle.

    Per trial: a random orthonormal system ``(f_j)`` with non-negative
    occupations ``n_j``; the density ratio
    ``C'_k = ||sum n_j |A f_j|^2||_{L_t^{q'/2} L_x^{p'/2}} / ||n||_{alpha'}``;
    and Schatten ratios
    ``||W A A^* W||_{G^alpha} / ||W||^2_{L_t^{2q/(2-q)} L_x^{2p/(2-p)}}``
    for a random complex ``W`` and for ``W = sqrt(V)``, ``V`` the Hoelder
    extremiser of the trial's density.  ``C`` is the largest Schatten ratio
    over all trials; a trial violates the transfer when ``C'_k > (1+slack) C``.
    """
    if not (alpha >= 1.0):
        raise ExponentError(f"alpha must be >= 1, got {alpha}")
    (wt, wx), (rt, rx) = _duality_exponents(p, q)
    alpha_dual = dual_exponent(alpha)
    tw, sw = op.time_weights, op.space_weights
    shape = (tw.size, sw.size)
    d = op.domain_dim
    records = []
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        systems = int(rng.integers(1, d + 1))
        basis = random_isometry(d, systems, rng)
        occ = rng.uniform(0.0, 1.0, systems)
        rho = density_of(op, basis, occ)
        c_prime = mixed_lp(rho, tw, sw, rt, rx) / _lp_counting(occ, alpha_dual)

        w_rand = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        c_rand = sandwich_schatten_norm(op, w_rand, alpha) / mixed_lp(w_rand, tw, sw, wt, wx) ** 2
        w_dual = np.sqrt(holder_extremiser(rho, tw, sw, rt, rx))
        c_dual = sandwich_schatten_norm(op, w_dual, alpha) / mixed_lp(w_dual, tw, sw, wt, wx) ** 2
        records.append(DualityTrial(k, systems, float(c_rand), float(c_dual), float(c_prime)))
    c_all = max(max(r.constant_random_w, r.constant_dual_w) for r in records)
    c_rand_only = max(r.constant_random_w for r in records)
    c_transfer = max(r.density_constant for r in records)
    return DualityReport(
        alpha=float(alpha),
        p=float(p),
        q=float(q),
        trials=records,
        constant=c_all,
        constant_random_only=c_rand_only,
        transferred_constant=c_transfer,
        violations=sum(r.density_constant > (1.0 + slack) * c_all for r in records),
        violations_random_only=sum(r.density_constant > (1.0 + slack) * c_rand_only for r in records),
        slack=slack,
        metadata=dict(op.metadata),
    )


def _lp_counting(v, p: float) -> float:
    v = np.abs(np.asarray(v, dtype=float))
    if math.isinf(p):
        return float(v.max())
    return float(np.sum(v**p) ** (1.0 / p))


__all__ = [
    "OperatorMatrix",
    "SchattenReport",
    "SynthesisOperator",
    "DualityTrial",
    "DualityReport",
    "discretize_multiplication",
    "singular_values",
    "norm_from_singular_values",
    "schatten_norm",
    "random_unitary",
    "random_isometry",
    "propagator_synthesis",
    "sandwich_schatten_norm",
    "density_of",
    "duality_check",
]
