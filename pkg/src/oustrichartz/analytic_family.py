"""The analytic family ``G_z(mu, nu) = (nu - |mu|)_+^z / Gamma(z + 1)``, its
kernel ``K_z``, and the one-sided power series ``sum_k k_+^z e^{-ikt}``.

All complex powers use the principal branch.  Computation is restricted to
the strip ``-1 < Re z <= 0`` where the series is Abel summable with a
locally integrable singularity at ``t = 0``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, PoleError, StripError
from .ou_semigroup import (
    DEFAULT_EPS_T,
    ComplexTime,
    check_time,
    distance_to_multiple,
    mehler_kernel,
    spectral_kernel_sum,
)

# Lanczos approximation, g = 7, nine terms.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _is_pole(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _gamma_right(z: complex) -> complex:
    """Lanczos sum, accurate for ``Re z >= 1/2``."""
    z = z - 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (z + k)
    shifted = z + _LANCZOS_G + 0.5
    return _SQRT_2PI * cmath.exp((z + 0.5) * cmath.log(shifted) - shifted) * acc


def complex_gamma(z) -> complex:
    """``Gamma(z)`` for complex ``z`` off the non-positive integers.

    Uses reflection ``Gamma(z) Gamma(1 - z) = pi / sin(pi z)`` below
    ``Re z = 1/2``.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"Gamma needs a finite argument, got {z}")
    if _is_pole(z):
        raise PoleError(f"Gamma has a pole at z = {z.real:g}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * _gamma_right(1.0 - z))
    return _gamma_right(z)


def reciprocal_gamma(z) -> complex:
    """``1 / Gamma(z)``, entire: zero at the poles of Gamma."""
    z = complex(z)
    if _is_pole(z):
        return 0j
    return 1.0 / complex_gamma(z)


@dataclass(frozen=True)
class AnalyticParameter:
    """Complex ``z`` restricted to the computational strip ``-1 < Re z <= 0``."""

    z: complex

    def __post_init__(self):
        z = complex(self.z)
        if not (-1.0 < z.real <= 0.0):
            raise StripError(f"Re z must lie in (-1, 0], got {z.real:g}")
        object.__setattr__(self, "z", z)

    @property
    def psi(self) -> complex:
        """``1 / Gamma(z + 1)``."""
        return reciprocal_gamma(self.z + 1.0)


def _param(z) -> AnalyticParameter:
    return z if isinstance(z, AnalyticParameter) else AnalyticParameter(z)


def gz_weight(z, mu, nu: int) -> complex:
    """``(nu - |mu|)_+^z / Gamma(z + 1)``; zero when ``nu <= |mu|``."""
    p = _param(z)
    gap = int(nu) - sum(int(m) for m in mu)
    if gap <= 0:
        return 0j
    return complex(gap**p.z * p.psi)


@dataclass
class SeriesResult:
    """Outcome of one Abel-Richardson evaluation."""

    value: complex
    error_estimate: float
    abel_steps: tuple
    abel_sums: tuple
    terms: int
    converged: bool
    details: dict = field(default_factory=dict)


#: Number of Abel-ladder points; the extrapolation is a polynomial in ``h``
#: of degree ``LADDER - 1``.
LADDER = 4
#: ``h0 = dist(t, 2 pi Z) / STEP_DIVISOR`` keeps ``h`` well inside the radius
#: of convergence ``~ |1 - e^{-it}|`` of the expansion in ``h``.
STEP_DIVISOR = 64.0
#: Terms are kept until ``rho^k < e^{-TAIL_EXPONENT}``.
TAIL_EXPONENT = 41.5
DEFAULT_SERIES_TOL = 1e-6
_CHUNK = 1 << 18


def _neville_at_zero(h: np.ndarray, s: np.ndarray) -> complex:
    """Value at ``h = 0`` of the interpolating polynomial through ``(h, s)``."""
    p = list(s.astype(complex))
    n = len(h)
    for level in range(1, n):
        for i in range(n - level):
            j = i + level
            p[i] = (h[j] * p[i] - h[i] * p[i + 1]) / (h[j] - h[i])
    return p[0]


def dirichlet_series_detailed(z, t: float, eps_t: float = DEFAULT_EPS_T,
                              tol: float = DEFAULT_SERIES_TOL, h0: float | None = None,
                              max_terms: int = 50_000_000) -> SeriesResult:
    """``sum_{k>=1} k^z e^{-ikt}`` by Abel summation and Richardson extrapolation.

    The Abel sums ``S(rho) = sum k^z rho^k e^{-ikt}`` are analytic in
    ``h = 1 - rho`` near ``0`` when ``t`` is not in ``2 pi Z``; they are
    evaluated on the ladder ``h0 2^{-j}`` and extrapolated to ``h = 0``.
    The error estimate compares the extrapolants through the last
    ``LADDER - 1`` and all ``LADDER`` points.
    """
    p = _param(z)
    if eps_t <= 0:
        raise DomainError(f"eps_t must be positive, got {eps_t}")
    d = distance_to_multiple(t, 2.0 * math.pi)
    if d <= eps_t:
        raise DomainError(f"t={t!r} lies within eps_t={eps_t} of 2 pi Z where the series diverges")
    h0 = min(d, math.pi) / STEP_DIVISOR if h0 is None else float(h0)
    hs = h0 * 2.0 ** -np.arange(LADDER)
    terms = int(math.ceil(TAIL_EXPONENT / hs[-1]))
    if terms > max_terms:
        raise ConvergenceError(f"{terms} terms needed, above the cap of {max_terms}")
    log_rho = np.log1p(-hs)
    sums = np.zeros(LADDER, dtype=complex)
    # Chunked accumulation; per-chunk partial sums keep roundoff ~ sqrt(terms) eps.
    for start in range(1, terms + 1, _CHUNK):
        k = np.arange(start, min(start + _CHUNK, terms + 1), dtype=float)
        base = np.exp(p.z * np.log(k) - 1j * t * k)
        damp = np.exp(np.outer(log_rho, k))
        sums += damp @ base
    value = _neville_at_zero(hs, sums)
    coarse = _neville_at_zero(hs[1:], sums[1:])
    err = abs(value - coarse)
    scale = max(abs(value), 1e-300)
    converged = bool(err <= tol * scale)
    return SeriesResult(
        value=complex(value),
        error_estimate=float(err / scale),
        abel_steps=tuple(float(h) for h in hs),
        abel_sums=tuple(complex(s) for s in sums),
        terms=terms,
        converged=converged,
        details={"h0": float(h0), "tol": tol},
    )


def dirichlet_series(z, t: float, eps_t: float = DEFAULT_EPS_T,
                     tol: float = DEFAULT_SERIES_TOL) -> complex:
    """Value of ``sum_{k>=0} k_+^z e^{-itk}``; raises :class:`ConvergenceError`
    when the extrapolation does not settle to relative ``tol``."""
    res = dirichlet_series_detailed(z, t, eps_t=eps_t, tol=tol)
    if not res.converged:
        raise ConvergenceError(
            f"Abel extrapolation at z={complex(z)}, t={t} disagrees by {res.error_estimate:.2e}"
        )
    return res.value


def principal_power(base: complex, exponent: complex) -> complex:
    return cmath.exp(complex(exponent) * cmath.log(complex(base)))


def series_asymptotic(z, t: float) -> complex:
    """Leading singular term ``Gamma(z + 1) (it)^{-z-1}``."""
    t = float(t)
    if t == 0.0:
        raise DomainError("the leading term is singular at t = 0")
    z = complex(z)
    return complex_gamma(z + 1.0) * principal_power(1j * t, -z - 1.0)


def kz_kernel(z, x, y, t: float, n: int = 1, degree: int | None = None,
              eps_t: float = DEFAULT_EPS_T, tol: float = DEFAULT_SERIES_TOL) -> complex:
    """``K_z(x, y, t) = Gamma(z+1)^{-1} M_{it}(x, y) sum_k k_+^z e^{-ikt}``.

    Writing ``nu = |mu| + k`` separates the double sum into the Schroedinger
    kernel times the one-sided power series.  ``degree = None`` takes the
    closed-form kernel; an integer truncates the Hermite sum instead.  With
    no damping that sum does not converge pointwise, so the truncated route is
    only a diagnostic for smooth test data.
    """
    p = _param(z)
    check_time(t, eps_t)
    if degree is None:
        m = mehler_kernel(ComplexTime(0.0, t, eps_t), x, y, n=n)
    else:
        m = spectral_kernel_sum(ComplexTime(0.0, t, eps_t), x, y, degree, n=n)
    out = np.asarray(m) * dirichlet_series(p.z, t, eps_t=eps_t, tol=tol) * p.psi
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float  # max |log y - fit|

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "residual": self.residual}


def fit_loglog_slope(xs, ys) -> SlopeFit:
    """Least-squares line through ``(log x, log y)``."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    if lx.size < 2:
        raise DomainError("a slope needs at least two points")
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.max(np.abs(ly - (slope * lx + intercept))))
    return SlopeFit(float(slope), float(intercept), resid)


def expected_singularity_exponent(z, n: int) -> float:
    """``-Re(z + 1 + n/2)``, the predicted log-log slope of ``|K_z|`` at ``t -> 0``."""
    return -(complex(z).real + 1.0 + n / 2.0)


def kernel_exponent_fit(z, n: int, t_min: float = 0.01, t_max: float = 0.1,
                        points: int = 25, x=0.0, y=0.0) -> SlopeFit:
    """Fit of ``log |K_z(x, y, t)|`` against ``log t`` on a geometric ``t`` ladder."""
    ts = np.geomspace(t_min, t_max, points)
    xp = np.zeros(n) + x
    yp = np.zeros(n) + y
    mags = [abs(kz_kernel(z, xp, yp, float(t), n=n)) for t in ts]
    return fit_loglog_slope(ts, mags)


def zero_crossing(re_z, slopes) -> float:
    """Root in ``Re z`` of the least-squares line through ``(Re z, slope)``."""
    slopes = np.asarray(slopes, dtype=float)
    a, b = np.polyfit(np.asarray(re_z, dtype=float), slopes, 1)
    if abs(a) <= 1e-12 * max(1.0, float(np.max(np.abs(slopes)))):
        raise DomainError("slope law is flat in Re z; no crossing")
    return float(-b / a)


__all__ = [
    "complex_gamma",
    "reciprocal_gamma",
    "AnalyticParameter",
    "gz_weight",
    "SeriesResult",
    "dirichlet_series",
    "dirichlet_series_detailed",
    "series_asymptotic",
    "kz_kernel",
    "SlopeFit",
    "fit_loglog_slope",
    "expected_singularity_exponent",
    "kernel_exponent_fit",
    "zero_crossing",
]
