import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oustrichartz.analytic_family import (
    AnalyticParameter,
    complex_gamma,
    dirichlet_series,
    dirichlet_series_detailed,
    expected_singularity_exponent,
    fit_loglog_slope,
    gz_weight,
    kz_kernel,
    reciprocal_gamma,
    series_asymptotic,
    zero_crossing,
)
from oustrichartz.errors import ConvergenceError, DomainError, PoleError, StripError
from oustrichartz.ou_semigroup import ComplexTime, mehler_kernel


@settings(max_examples=40, deadline=None)
@given(st.floats(-4.7, 6.0), st.floats(-8.0, 8.0))
def test_gamma_against_mpmath(a, b):
    z = complex(a, b)
    if abs(z - round(a)) < 1e-3 and round(a) <= 0:
        return
    ref = complex(mpmath.gamma(mpmath.mpc(a, b)))
    assert abs(complex_gamma(z) - ref) <= 1e-12 * abs(ref)


def test_gamma_real_values_and_poles():
    assert complex_gamma(5) == pytest.approx(24.0, rel=1e-14)
    assert complex_gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    with pytest.raises(PoleError):
        complex_gamma(-2)
    assert reciprocal_gamma(-3) == 0


def test_reciprocal_gamma_growth_bound():
    for s in np.linspace(-10, 10, 41):
        assert abs(reciprocal_gamma(1 + 1j * s)) <= 1.1 * math.exp(math.pi * abs(s) / 2)


def test_strip_and_weights():
    with pytest.raises(StripError):
        AnalyticParameter(-1.0)
    with pytest.raises(StripError):
        AnalyticParameter(0.1)
    assert gz_weight(0.0, (1, 2), 8) == pytest.approx(1.0)
    assert gz_weight(-0.5, (1,), 5) == pytest.approx(0.5 / math.sqrt(math.pi))
    assert gz_weight(-0.5, (3,), 3) == 0


@pytest.mark.parametrize("z", [-0.25, -0.5, -0.75, complex(-0.5, 0.7)])
@pytest.mark.parametrize("t", [0.05, 0.5, 2.0, -1.3])
def test_series_against_polylog(z, t):
    ref = complex(mpmath.polylog(-mpmath.mpmathify(z), mpmath.exp(-1j * t)))
    val = dirichlet_series(z, t)
    assert abs(val - ref) <= 1e-7 * abs(ref)


def test_series_at_zero_is_geometric():
    t = 0.8
    geo = cmath.exp(-1j * t) / (1 - cmath.exp(-1j * t))
    assert dirichlet_series(0.0, t) == pytest.approx(geo, rel=1e-8)
    assert dirichlet_series(-1e-9, t) == pytest.approx(geo, rel=1e-7)


def test_series_guards():
    with pytest.raises(DomainError):
        dirichlet_series(-0.5, 2 * math.pi + 1e-4)
    with pytest.raises(ConvergenceError):
        dirichlet_series_detailed(-0.5, 0.01, max_terms=1000)
    with pytest.raises(ConvergenceError):
        dirichlet_series(-0.5, 0.3, tol=1e-30)
    with pytest.raises(DomainError):
        series_asymptotic(-0.5, 0.0)


def test_asymptotic_leading_term():
    assert series_asymptotic(-0.5, 1.0) == pytest.approx(math.sqrt(math.pi) * cmath.exp(-1j * math.pi / 4))


def test_kernel_factorisation():
    z, t = -0.25, 0.7
    val = kz_kernel(z, 0.3, -0.2, t)
    expect = mehler_kernel(ComplexTime(0.0, t), 0.3, -0.2) * dirichlet_series(z, t) / complex_gamma(0.75)
    assert val == pytest.approx(expect, rel=1e-12)


def test_fit_and_crossing_helpers():
    xs = np.geomspace(1, 10, 5)
    fit = fit_loglog_slope(xs, 3 * xs**-1.5)
    assert fit.slope == pytest.approx(-1.5) and fit.residual < 1e-12
    assert zero_crossing([-0.25, -0.5, -0.75], [-1.25, -1.0, -0.75]) == pytest.approx(-1.5)
    assert expected_singularity_exponent(-0.5, 2) == -1.5
    with pytest.raises(DomainError):
        zero_crossing([0, 1], [2, 2])
