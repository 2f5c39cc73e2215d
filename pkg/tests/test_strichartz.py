import math

import numpy as np
import pytest

from oustrichartz.errors import DimensionMismatchError, DomainError, ExponentError
from oustrichartz.fourier_hermite import TimeGrid
from oustrichartz.hermite_core import SpectralField, gauss_hermite_rule, tensor_grid
from oustrichartz.strichartz import (
    OrthonormalSystem,
    check_admissible,
    density,
    half_time_norms,
    ladder_degree,
    make_orthonormal_system,
    mixed_norm,
    occupation_norm,
    occupation_profile,
    schatten_exponent,
    strichartz_ladder,
    strichartz_ratio,
)


def test_system_is_orthonormal_and_deterministic():
    a = make_orthonormal_system(6, 5, 2, seed=3)
    b = make_orthonormal_system(6, 5, 2, seed=3)
    assert a.orthonormality_error() < 1e-13
    np.testing.assert_array_equal(a.coefficients, b.coefficients)
    assert make_orthonormal_system(3, 4, 1, seed=0, real=True).is_real
    with pytest.raises(DomainError):
        make_orthonormal_system(7, 5, 1, seed=0)


def test_from_fields_checks_compatibility():
    f = SpectralField.basis_function((1,), 3)
    g = SpectralField.basis_function((1, 0), 3)
    with pytest.raises(DimensionMismatchError):
        OrthonormalSystem.from_fields([f, g])
    sys = OrthonormalSystem.from_fields([f, SpectralField.basis_function((2,), 3)])
    assert sys.size == 2 and sys.orthonormality_error() == 0


def test_density_mass_conserved():
    sys = make_orthonormal_system(4, 6, 1, seed=1)
    occ = [1.0, 0.5, 0.25, 2.0]
    rho = density(sys, occ, TimeGrid(32), tensor_grid(1, 30))
    np.testing.assert_allclose(rho.mass(), sum(occ), rtol=1e-12)
    with pytest.raises(DimensionMismatchError):
        density(sys, [1.0], TimeGrid(4), tensor_grid(1, 30))


def test_mixed_norm_of_h1_squared():
    sys = OrthonormalSystem.from_fields([SpectralField.basis_function((1,))])
    rho = density(sys, [1.0], TimeGrid(16), gauss_hermite_rule(20))
    # rho = 2x^2, int (2x^2)^3 d gamma = 15
    assert mixed_norm(rho, 3.0, 3.0) == pytest.approx((2 * math.pi * 15) ** (1 / 3), rel=1e-12)
    with pytest.raises(ExponentError):
        mixed_norm(rho, 0.5, 3.0)
    left, right = half_time_norms(rho, 3.0, 3.0)
    assert left == pytest.approx(right, rel=1e-12)


def test_admissibility():
    check_admissible(1, 3.0, 3.0)
    check_admissible(2, 2.0, 2.0)
    check_admissible(1, math.inf, 1.0)
    with pytest.raises(ExponentError):
        check_admissible(1, 3.0, 2.0)
    with pytest.raises(ExponentError):
        check_admissible(2, 1.0, 3.0)  # q at the excluded endpoint (n+1)/(n-1)


def test_exponent_helpers():
    assert schatten_exponent(3.0) == 1.5
    assert occupation_norm([1, 1, 1, 1], 1.0) == pytest.approx(4.0)
    np.testing.assert_allclose(occupation_profile("geometric", 3), [1, 0.5, 0.25])
    with pytest.raises(DomainError):
        occupation_profile("zipf", 3)
    assert ladder_degree(1, 16) == 15 and ladder_degree(2, 16) == 5


def test_single_ground_state_ratio():
    sys = OrthonormalSystem.from_fields([SpectralField.basis_function((0,))])
    rep = strichartz_ratio(sys, [1.0], 3.0, 3.0, TimeGrid(8), gauss_hermite_rule(4))
    assert rep.ratio == pytest.approx((2 * math.pi) ** (1 / 3), rel=1e-13)
    assert rep.r == 1.5 and '"ratio"' in rep.to_json()


def test_triangle_equality_at_endpoint():
    reps = strichartz_ladder(1, math.inf, 1.0, (1, 3, 5), "flat", seed=2, time_steps=32)
    for rep in reps:
        assert rep.ratio == pytest.approx(1.0, rel=1e-10)


def test_ladder_two_dimensional_runs():
    reps = strichartz_ladder(2, 2.0, 2.0, (1, 2, 4), "geometric", seed=0, time_steps=32)
    assert all(math.isfinite(r.ratio) and r.ratio > 0 for r in reps)
    assert reps[0].metadata["seed"] == 1
