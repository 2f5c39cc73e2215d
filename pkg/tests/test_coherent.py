import math

import numpy as np
import pytest

from oustrichartz.coherent import (
    LADDER_PRESETS,
    CoherentParams,
    berezin_lieb_bound,
    coherent_ladder,
    coherent_state,
    cross_validate_coherent,
    gamma0_density_closed_form,
    gamma0_density_quadrature,
    gamma0_eigenvalues,
    gaussian_space_norms,
    gh_gaussian_norm_estimate,
    optimality_scan,
    propagated_coherent_modulus,
    slope_floor,
    trace_N,
    trace_N_quadrature,
)
from oustrichartz.errors import DimensionMismatchError, DomainError, ExponentError, RegimeError


def test_centred_state_value():
    assert coherent_state(CoherentParams(0.5), 0.0) == pytest.approx(1.0)


def test_state_is_normalised_in_two_dimensions():
    p = CoherentParams(0.4, x=(0.5, -1.0), xi=(1.0, 0.3))
    from oustrichartz.hermite_core import tensor_grid

    g = tensor_grid(2, 90)
    vals = coherent_state(p, g.nodes)
    assert g.integrate(np.abs(vals) ** 2) == pytest.approx(1.0, abs=1e-9)


def test_parameter_validation():
    with pytest.raises(DomainError):
        CoherentParams(-1.0)
    with pytest.raises(DimensionMismatchError):
        CoherentParams(1.0, x=(0.0, 0.0), xi=(0.0,))
    with pytest.raises(RegimeError):
        CoherentParams(0.1, 2.0, 2.0).check_regime()
    assert CoherentParams(1.0, 2.0, 2.0).with_dimension(3).dimension == 3


def test_modulus_at_time_zero_is_the_state():
    p = CoherentParams(0.7, x=(0.4,), xi=(-1.0,))
    z = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(propagated_coherent_modulus(p, 0.0, z), np.abs(coherent_state(p, z)), rtol=1e-13)
    with pytest.raises(DomainError):
        propagated_coherent_modulus(p, 0.0, z, form="other")


def test_cross_check_decides_between_forms():
    rep = cross_validate_coherent(CoherentParams(0.3, x=(1.0,), xi=(2.0,)), 0.8)
    assert rep.max_rel_error["derived"] < 1e-8
    assert rep.flag  # the printed variant disagrees and says so
    assert rep.to_dict()["flag"] is True
    with pytest.raises(DimensionMismatchError):
        cross_validate_coherent(CoherentParams(0.3, x=(0.0, 0.0), xi=(0.0, 0.0)), 0.8)


def test_density_consistency():
    p = CoherentParams(0.5, 3.0, 10.0)
    z = np.linspace(-1.5, 1.5, 7)
    closed = gamma0_density_closed_form(p, 0.4, z)
    quad = gamma0_density_quadrature(p, 0.4, z)
    np.testing.assert_allclose(quad, closed, rtol=1e-10)
    assert np.all(closed > 0)
    # time zero: the density of the initial ensemble
    direct = gamma0_density_quadrature(p, 0.0, z)
    np.testing.assert_allclose(gamma0_density_closed_form(p, 0.0, z), direct, rtol=1e-10)


@pytest.mark.parametrize("t", [0.0, 0.3, 1.1, 2.5])
def test_density_integrates_to_trace(t):
    p = CoherentParams(1.0, 1.5, 2.0)
    u = np.linspace(-40, 40, 20001)
    mass = np.trapezoid(gamma0_density_closed_form(p, t, u, picture="flat"), u)
    assert mass == pytest.approx(trace_N(p), rel=1e-6)


def test_trace_and_bounds():
    p = CoherentParams(1.0, 2.0, 4.0)
    assert trace_N(p) == pytest.approx(2.0)
    assert trace_N(CoherentParams(1.0, 4.0, 4.0)) == pytest.approx(2 * trace_N(p))
    assert trace_N_quadrature(p) == pytest.approx(trace_N(p), rel=1e-12)
    assert berezin_lieb_bound(p, 1.0) == trace_N(p)
    assert berezin_lieb_bound(p, 2.0) == pytest.approx(1.0)
    with pytest.raises(ExponentError):
        berezin_lieb_bound(p, 0.5)


def test_nystrom_spectrum_respects_bounds():
    p = CoherentParams(1.0, 1.5, 2.0)
    ev = gamma0_eigenvalues(p)
    assert ev.min() > -1e-12
    assert ev.sum() == pytest.approx(trace_N(p), rel=1e-8)
    for r in (1.5, 2.0, 3.0):
        assert np.sum(np.clip(ev, 0, None) ** r) <= berezin_lieb_bound(p, r) * (1 + 1e-9)


def test_gaussian_measure_norm_diverges_on_the_ladder():
    p = coherent_ladder(LADDER_PRESETS["small"])[0]
    assert np.all(np.isinf(gaussian_space_norms(p, np.linspace(-3, 3, 7), 3.0)))
    coarse = gh_gaussian_norm_estimate(p, 0.3, 3.0, 40)
    fine = gh_gaussian_norm_estimate(p, 0.3, 3.0, 160)
    assert fine > coarse


def test_scan_guards_and_floor():
    ladder = coherent_ladder(LADDER_PRESETS["small"])
    with pytest.raises(DomainError):
        optimality_scan(3.0, 2.0, ladder[:3])
    with pytest.raises(RegimeError):
        optimality_scan(3.0, 1.2, ladder)
    with pytest.raises(RegimeError):
        optimality_scan(3.0, 2.0, [CoherentParams(0.1, 2.0, 2.0)] * 4)
    assert slope_floor(3.0, 1.5) == pytest.approx(0.0)


@pytest.mark.parametrize("preset", ["small", "medium", "large"])
def test_scan_presets_pass(preset):
    rep = optimality_scan(3.0, 2.0, coherent_ladder(LADDER_PRESETS[preset]))
    assert rep.passed and rep.gaussian_divergent
    lines = rep.to_jsonl().splitlines()
    assert len(lines) == 5 and rep.to_csv().startswith("log_N,log_ratio")

