import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_hermite

from oustrichartz.errors import BudgetExceededError, DimensionMismatchError, DomainError, ResolutionError
from oustrichartz.hermite_core import (
    MAX_NODES,
    MultiIndex,
    SpectralField,
    basis_on_points,
    basis_size,
    gauss_hermite_rule,
    hermite_eval,
    hermite_table,
    multi_hermite_eval,
    multi_indices,
    tensor_grid,
)


def test_low_order_values():
    assert hermite_eval(0, 0.3) == 1.0
    assert hermite_eval(1, 0.3) == pytest.approx(math.sqrt(2) * 0.3, rel=1e-15)
    assert hermite_eval(2, 0.3) == pytest.approx((2 * 0.09 - 1) / math.sqrt(2), rel=1e-14)


@pytest.mark.parametrize("k", [3, 7, 15, 30])
def test_matches_physicists_polynomials(k):
    x = np.linspace(-3, 3, 13)
    ref = eval_hermite(k, x) / math.sqrt(2.0**k * math.factorial(k))
    np.testing.assert_allclose(hermite_table(k, x)[k], ref, rtol=1e-11, atol=1e-12)


def test_range_guard():
    with pytest.raises(DomainError):
        hermite_table(3, [11.0])
    with pytest.raises(DomainError):
        hermite_table(3, [np.nan])
    hermite_table(3, [11.0], check_range=False)


def test_multi_index_order_and_validation():
    assert MultiIndex((2, 0, 3)).order() == 5
    with pytest.raises(DomainError):
        MultiIndex((1, -1))


def test_multi_indices_graded():
    idx = multi_indices(2, 3)
    assert idx.shape == (basis_size(2, 3), 2) == (10, 2)
    orders = idx.sum(axis=1)
    assert np.all(np.diff(orders) >= 0)
    assert tuple(idx[0]) == (0, 0)


def test_multi_hermite_eval_factorises():
    x = np.array([0.4, -1.2])
    assert multi_hermite_eval((2, 3), x) == pytest.approx(hermite_eval(2, 0.4) * hermite_eval(3, -1.2))
    with pytest.raises(DimensionMismatchError):
        multi_hermite_eval((1, 1, 1), x)


@pytest.mark.parametrize("m", [1, 2, 5, 20, 80, MAX_NODES])
def test_rule_integrates_moments(m):
    rule = gauss_hermite_rule(m)
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-14)
    assert np.all(rule.weights > 0)
    # E[x^{2j}] = (2j-1)!! / 2^j under the probability measure
    for j in range(0, min(m, 8)):
        exact = math.prod(range(1, 2 * j, 2)) / 2.0**j
        assert rule.integrate(rule.axis_nodes ** (2 * j)) == pytest.approx(exact, rel=1e-12)


def test_rule_symmetric_and_guards():
    rule = gauss_hermite_rule(17)
    np.testing.assert_array_equal(rule.axis_nodes, -rule.axis_nodes[::-1])
    with pytest.raises(DomainError):
        gauss_hermite_rule(0)
    with pytest.raises(BudgetExceededError):
        gauss_hermite_rule(MAX_NODES + 1)
    with pytest.raises(BudgetExceededError):
        tensor_grid(3, 100)


def test_tensor_grid_layout():
    g = tensor_grid(2, 4)
    assert g.size == 16 and g.nodes.shape == (16, 2)
    base = gauss_hermite_rule(4)
    assert g.nodes[1, 1] == base.axis_nodes[1] and g.nodes[1, 0] == base.axis_nodes[0]
    assert g.weights[5] == pytest.approx(base.axis_weights[1] ** 2)


def test_require_degree():
    g = gauss_hermite_rule(5)
    g.require_degree(4)
    with pytest.raises(ResolutionError):
        g.require_degree(5)


def test_basis_on_points_consistent_with_grid():
    g = tensor_grid(2, 6)
    np.testing.assert_allclose(basis_on_points(2, 4, g.nodes), g.basis(4), rtol=1e-13, atol=1e-13)


def test_spectral_field_helpers():
    f = SpectralField.basis_function((1, 2))
    assert f.degree == 3 and f.coefficient((1, 2)) == 1
    assert f.norm() == 1.0
    with pytest.raises(DimensionMismatchError):
        SpectralField(1, 3, np.zeros(3))
    with pytest.raises(DomainError):
        f.position((4, 0))
    pt = np.array([[0.5, -0.25]])
    assert f.evaluate(pt)[0] == pytest.approx(multi_hermite_eval((1, 2), pt[0]))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 40), st.floats(-5, 5))
def test_recurrence_bounded_growth(k, x):
    # Cramer-type bound: |h_k(x)| e^{-x^2/2} stays below 1
    assert abs(hermite_eval(k, x)) * math.exp(-x * x / 2) <= 1.0 + 1e-12
