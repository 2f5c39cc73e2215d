"""Ornstein-Uhlenbeck semigroup ``e^{-z L}`` and the Schroedinger flow
``e^{-itL}`` for ``L = -1/2 Delta + <x, grad>`` on ``L^2(gamma_n)``.

Two independent realisations are provided: phase multiplication of Hermite
coefficients (exact, eigenvalue ``|alpha|``) and integration against the
closed-form Mehler kernel.  The kernel is normalised against ``gamma_n``, so
``M_z(x, y) = sum_alpha e^{-z|alpha|} h_alpha(x) h_alpha(y)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, DomainError, ExponentError, SingularTimeError
from .hermite_core import QuadratureGrid, SpectralField, hermite_table

DEFAULT_EPS_T = 1e-3


def distance_to_multiple(t: float, period: float = math.pi) -> float:
    return abs(t - period * round(t / period))


def wrap_time(t):
    """Map ``t`` into ``(-pi, pi]``."""
    t = np.asarray(t, dtype=float)
    out = np.pi - np.mod(np.pi - t, 2 * np.pi)
    return out if out.ndim else float(out)


def check_time(t: float, eps_t: float = DEFAULT_EPS_T) -> None:
    if eps_t <= 0:
        raise DomainError(f"eps_t must be positive, got {eps_t}")
    if distance_to_multiple(t) <= eps_t:
        raise SingularTimeError(
            f"t={t!r} lies within eps_t={eps_t} of a multiple of pi where sin t = 0"
        )


@dataclass(frozen=True)
class ComplexTime:
    """``z' = r + i t`` with dissipative part ``r >= 0``."""

    r: float
    t: float
    eps_t: float = DEFAULT_EPS_T

    def __post_init__(self):
        if not (self.r >= 0):
            raise DomainError(f"dissipative part must be >= 0, got r={self.r}")
        if self.r == 0:
            check_time(self.t, self.eps_t)

    @property
    def value(self) -> complex:
        return complex(self.r, self.t)


def _as_points(x, n: int) -> tuple[np.ndarray, int]:
    """Points with trailing axis of length ``n``; for ``n = 1`` plain arrays
    of abscissae are accepted and get the axis appended."""
    x = np.asarray(x, dtype=float)
    if n == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    if x.shape[-1] != n:
        raise DimensionMismatchError(f"points have trailing dimension {x.shape[-1]}, expected {n}")
    return x, n


def _log_mehler_1d(w: complex, x, y) -> np.ndarray:
    """``log M(x, y)`` in one dimension as a function of ``w = e^{-z'}``.

    Uses ``(1 - w^2)^{-1/2} exp((2xyw - (x^2 + y^2) w^2) / (1 - w^2))``; for
    ``|w| <= 1`` the principal branch of ``(1 - w^2)^{-1/2}`` is the correct
    continuation from ``w = 0``, including the unitary limit ``|w| = 1``.
    """
    one_m = 1.0 - w * w
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return -0.5 * np.log(one_m) + (2.0 * x * y * w - (x * x + y * y) * w * w) / one_m


def mehler_kernel(z: ComplexTime, x, y, n: int = 1) -> np.ndarray | complex:
    """Kernel of ``e^{-z' L}`` with respect to ``gamma_n``.

    Equal to ``e^{z'n/2} (2 sinh z')^{-n/2} exp(((1 - coth z')(|x|^2+|y|^2)
    + 2 x.y / sinh z') / 2)`` on the principal branch; evaluated through
    ``w = e^{-z'}`` so that large ``r`` does not overflow.  ``x`` and ``y``
    broadcast with trailing axis of length ``n`` (scalars allowed for n = 1).
    """
    if not isinstance(z, ComplexTime):
        z = ComplexTime(*z)
    x, n = _as_points(x, n)
    y, _ = _as_points(y, n)
    w = np.exp(-z.value)
    log_k = np.sum(_log_mehler_1d(w, x, y), axis=-1)
    out = np.exp(log_k)
    return complex(out) if out.ndim == 0 else out


def mehler_kernel_hyperbolic(z: ComplexTime, x, y, n: int = 1):
    """Same kernel written with ``sinh`` and ``coth`` (principal branch).

    Valid for moderate ``r``; kept as an independent evaluation route.
    """
    if not isinstance(z, ComplexTime):
        z = ComplexTime(*z)
    x, n = _as_points(x, n)
    y, _ = _as_points(y, n)
    zc = z.value
    sh = np.sinh(zc)
    sq = np.sum(x * x, axis=-1) + np.sum(y * y, axis=-1)
    xy = np.sum(x * y, axis=-1)
    pref = np.exp(zc * n / 2.0) * (2.0 * sh) ** (-n / 2.0)
    out = pref * np.exp(0.5 * ((1.0 - np.cosh(zc) / sh) * sq + 2.0 * xy / sh))
    return complex(out) if np.ndim(out) == 0 else out


def imaginary_time_kernel(t: float, x, y, n: int = 1, eps_t: float = DEFAULT_EPS_T):
    """Explicit kernel of ``e^{-itL}``.

    ``e^{-i pi n s/4} e^{itn/2} |2 sin t|^{-n/2} e^{(|x|^2+|y|^2)/2}
    exp(i/2 (cot t (|x|^2+|y|^2) - 2 x.y / sin t))`` with ``s = sign(sin t)``
    after reducing ``t`` into ``(-pi, pi]``; the sign-dependent phase is the
    continuation of the principal branch across ``t = 0``.
    """
    check_time(t, eps_t)
    t = wrap_time(t)
    x, n = _as_points(x, n)
    y, _ = _as_points(y, n)
    s, c = math.sin(t), math.cos(t)
    sq = np.sum(x * x, axis=-1) + np.sum(y * y, axis=-1)
    xy = np.sum(x * y, axis=-1)
    phase = np.exp(1j * (-math.pi * n * math.copysign(1.0, s) / 4.0 + t * n / 2.0))
    log_mod = -0.5 * n * math.log(abs(2.0 * s)) + 0.5 * sq
    out = phase * np.exp(log_mod + 0.5j * (c / s * sq - 2.0 * xy / s))
    return complex(out) if np.ndim(out) == 0 else out


def spectral_kernel_sum(z: ComplexTime, x, y, degree: int, n: int = 1, truncation: str = "total"):
    """Truncated eigen-expansion of the kernel.

    ``truncation="total"`` keeps ``|alpha| <= K``; ``"axis"`` keeps
    ``max_j alpha_j <= K`` (the product of one-dimensional sums).
    """
    if not isinstance(z, ComplexTime):
        z = ComplexTime(*z)
    if truncation not in ("total", "axis"):
        raise DomainError(f"truncation must be 'total' or 'axis', got {truncation!r}")
    x, n = _as_points(x, n)
    y, _ = _as_points(y, n)
    x, y = np.broadcast_arrays(x, y)
    q = np.exp(-z.value)
    weights = q ** np.arange(degree + 1)
    per_axis = hermite_table(degree, x) * hermite_table(degree, y)  # (K+1, ..., n)
    if truncation == "axis":
        out = np.prod(np.tensordot(weights, per_axis, axes=(0, 0)), axis=-1)
        return complex(out) if np.ndim(out) == 0 else out
    # total order <= K: convolve the per-axis order profiles
    total = per_axis[..., 0].astype(complex)
    for j in range(1, n):
        nxt = np.zeros_like(total)
        for k in range(degree + 1):
            nxt[k:] += total[k] * per_axis[: degree + 1 - k, ..., j]
        total = nxt
    out = np.tensordot(weights, total, axes=(0, 0))
    return complex(out) if np.ndim(out) == 0 else out


def propagate_spectral(f: SpectralField, t: float) -> SpectralField:
    """``e^{-itL} f``: coefficient at ``alpha`` times ``e^{-it|alpha|}``."""
    phases = np.exp(-1j * t * f.orders)
    return SpectralField(f.dimension, f.degree, f.coefficients * phases)


def kernel_matrix_1d(grid: QuadratureGrid, t: float, targets=None, eps_t: float = DEFAULT_EPS_T):
    """``A[i, k] = w_k M_{it}(x_i, y_k)`` for one axis of ``grid``.

    The weight enters through its logarithm inside the same exponential as
    the kernel, since ``e^{y^2/2}`` overflows long before ``w_k`` underflows.
    """
    check_time(t, eps_t)
    y = grid.axis_nodes
    x = y if targets is None else np.asarray(targets, dtype=float).reshape(-1)
    log_k = _log_mehler_1d(np.exp(-1j * t), x[:, None], y[None, :])
    return np.exp(log_k + np.log(grid.axis_weights)[None, :])


def propagate_kernel(values, grid: QuadratureGrid, t: float, targets=None,
                     eps_t: float = DEFAULT_EPS_T) -> np.ndarray:
    """``(e^{-itL} f)(x) = sum_k w_k M_{it}(x, y_k) f(y_k)`` on a tensor grid.

    ``values`` are samples at ``grid.nodes``.  The kernel factorises over
    coordinates, so it is applied one axis at a time.  ``targets`` (optional)
    are one-dimensional abscissae shared by every axis; the output then lives
    on their tensor product instead of the grid.

    The kernel is a chirp ``exp(i cot(t) |y|^2 / 2)`` in ``y``.  The rule
    resolves it while ``|cot t|`` stays moderate, roughly ``t mod pi`` in
    ``[pi/4, 3 pi/4]``; nearer ``pi Z`` the quadrature error grows quickly and
    extra nodes recover little.  The spectral route has no such limit.
    """
    values = np.asarray(values, dtype=complex)
    m, n = grid.nodes_per_axis, grid.dimension
    if values.shape[-1] != grid.size:
        raise DimensionMismatchError(f"expected {grid.size} samples, got {values.shape[-1]}")
    a = kernel_matrix_1d(grid, t, targets, eps_t)
    lead = values.shape[:-1]
    arr = values.reshape(lead + (m,) * n)
    nl = len(lead)
    for ax in range(n):
        arr = np.moveaxis(np.tensordot(a, arr, axes=([1], [nl + ax])), 0, nl + ax)
    return arr.reshape(lead + (-1,))


def propagated_norm(f: SpectralField, grid: QuadratureGrid, t: float,
                    eps_t: float = DEFAULT_EPS_T) -> float:
    """``L^2(gamma_n)`` norm of the kernel-propagated samples of ``f``.

    The output is band-limited like ``f``, so it is read off at the nodes of
    the ``(K+1)``-point rule, where it is exactly integrable.  Reading it at
    the outer nodes of ``grid`` instead would pick up aliasing: the kernel's
    Hermite coefficients do not decay, so the quadrature sum carries the
    aliased high modes of ``f``, and these dominate where ``|x|`` is large.
    """
    from .hermite_core import tensor_grid

    band = tensor_grid(f.dimension, f.degree + 1)
    vals = propagate_kernel(f.on_grid(grid), grid, t, targets=band.axis_nodes, eps_t=eps_t)
    return float(np.sqrt(band.integrate(np.abs(vals) ** 2)))


def lp_norm_in_time_profile(f: SpectralField, p: float, t_grid, grid: QuadratureGrid) -> np.ndarray:
    """``t -> ||e^{-itL} f||_{L^p(gamma_n)}`` for real-coefficient ``f``."""
    if p < 1:
        raise ExponentError(f"need p >= 1, got {p}")
    if np.any(np.abs(f.coefficients.imag) > 0):
        raise DomainError("the time profile is defined for real-valued f (real coefficients)")
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    basis = grid.basis(f.degree)
    phases = np.exp(-1j * np.outer(t_grid, f.orders))
    vals = np.abs((phases * f.coefficients) @ basis)
    if np.isinf(p):
        return vals.max(axis=1)
    return (vals**p @ grid.weights) ** (1.0 / p)
