import math

import numpy as np
import pytest

from oustrichartz.errors import BudgetExceededError, DimensionMismatchError, ResolutionError, SurfaceError
from oustrichartz.fourier_hermite import (
    CoefficientTable,
    DiscreteSurface,
    SpaceTimeField,
    TimeGrid,
    assemble_TS,
    coefficients_from_json,
    coefficients_to_json,
    extension_operator,
    forward_transform,
    inverse_transform,
    restriction_operator,
    restriction_table,
    spacetime_inverse,
    spacetime_transform,
    surface_coefficients,
    surface_from_field,
)
from oustrichartz.hermite_core import SpectralField, basis_size, tensor_grid
from oustrichartz.ou_semigroup import propagate_spectral


def test_time_grid_midpoints():
    tg = TimeGrid(4)
    np.testing.assert_allclose(tg.points, [-3 * math.pi / 4, -math.pi / 4, math.pi / 4, 3 * math.pi / 4])
    assert tg.weights.sum() == pytest.approx(2 * math.pi)


def test_transform_round_trip():
    grid = tensor_grid(2, 12)
    f = SpectralField(2, 9, np.random.default_rng(0).standard_normal(basis_size(2, 9)))
    back = forward_transform(inverse_transform(f, grid), grid, 9)
    np.testing.assert_allclose(back.coefficients, f.coefficients, atol=1e-12)


def test_forward_transform_guards():
    grid = tensor_grid(1, 5)
    with pytest.raises(ResolutionError):
        forward_transform(np.zeros(5), grid, 5)
    with pytest.raises(DimensionMismatchError):
        forward_transform(np.zeros(4), grid, 2)


def test_surface_listing_order():
    s = DiscreteSurface.ou_surface(2, 2)
    assert s.members() == [((0, 0), 0), ((0, 1), 1), ((1, 0), 1), ((0, 2), 2), ((1, 1), 2), ((2, 0), 2)]
    assert s.contains((1, 1), 2) and not s.contains((1, 1), 1)
    lin = DiscreteSurface.linear(1, (1,), -1, 0, 3, 3)
    assert [m for m, _ in lin.members()] == [(0,), (1,), (2,), (3,)]


def test_space_time_round_trip_and_parseval():
    tg, grid = TimeGrid(16), tensor_grid(1, 8)
    rng = np.random.default_rng(5)
    table = CoefficientTable(1, 5, 6, rng.standard_normal((6, 13)) + 1j * rng.standard_normal((6, 13)))
    g = spacetime_inverse(table, tg, grid)
    back = spacetime_transform(g, 5, 6)
    np.testing.assert_allclose(back.values, table.values, atol=1e-12)
    assert g.norm() == pytest.approx(table.norm(), rel=1e-12)
    raw = restriction_table(g, 5, 6)
    np.testing.assert_allclose(raw.values, math.sqrt(2 * math.pi) * table.values, atol=1e-11)


def test_frequency_resolution_guard():
    tg, grid = TimeGrid(8), tensor_grid(1, 6)
    g = SpaceTimeField(tg, grid, np.zeros((8, 6)))
    with pytest.raises(ResolutionError):
        restriction_table(g, 3, 4)


def test_extension_is_the_propagator():
    tg, grid = TimeGrid(20), tensor_grid(2, 6)
    u = SpectralField(2, 4, np.random.default_rng(2).standard_normal(basis_size(2, 4)))
    s = DiscreteSurface.ou_surface(2, 4)
    g = extension_operator(surface_from_field(u, s), s, tg, grid)
    for j, t in enumerate(tg.points):
        np.testing.assert_allclose(g.values[j], propagate_spectral(u, t).on_grid(grid), atol=1e-12)


def test_restriction_is_adjoint_of_extension():
    tg, grid = TimeGrid(12), tensor_grid(1, 7)
    s = DiscreteSurface.linear(1, (2,), -1, 1, 4, 5)
    rng = np.random.default_rng(9)
    c = rng.standard_normal(len(s.members())) + 1j * rng.standard_normal(len(s.members()))
    g = SpaceTimeField(tg, grid, rng.standard_normal((12, 7)) + 1j * rng.standard_normal((12, 7)))
    lhs = extension_operator(c, s, tg, grid).inner(g)
    rhs = np.vdot(c, restriction_operator(g, s))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_surface_coefficient_mapping():
    s = DiscreteSurface.ou_surface(1, 3)
    vec = surface_coefficients({((2,), 2): 1.5}, s)
    assert vec[2] == 1.5 and np.count_nonzero(vec) == 1
    with pytest.raises(SurfaceError):
        surface_coefficients({((2,), 1): 1.0}, s)
    with pytest.raises(SurfaceError):
        surface_coefficients(np.zeros(3), s)
    with pytest.raises(SurfaceError):
        surface_from_field(SpectralField(1, 3, np.ones(4)), DiscreteSurface.rectangle(1, 3, 1))


def test_json_round_trip():
    s = DiscreteSurface.ou_surface(2, 2)
    c = np.arange(6) * (1 + 0.5j)
    back = coefficients_from_json(coefficients_to_json(c, s))
    np.testing.assert_allclose(surface_coefficients(back, s), c)


def test_ts_budget_and_metadata():
    s = DiscreteSurface.ou_surface(1, 3)
    ts = assemble_TS(s, TimeGrid(8), tensor_grid(1, 5))
    assert ts.metadata["surface_size"] == 4 and ts.shape == (40, 40)
    with pytest.raises(BudgetExceededError):
        assemble_TS(s, TimeGrid(64), tensor_grid(1, 40))
