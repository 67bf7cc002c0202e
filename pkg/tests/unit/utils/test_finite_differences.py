"""
Tests for grid finite differences.
"""

import numpy as np
import pytest

from spinframe.exceptions import StencilError
from spinframe.utils.finite_differences import (convergence_ratio, derivative, edge_mask,
                                                grid_gradient)


def test_fourth_order_is_exact_for_quartics():
    x = np.linspace(-1.0, 2.0, 13)
    values = 3.0 * x ** 4 - x ** 3 + 2.0 * x
    expected = 12.0 * x ** 3 - 3.0 * x ** 2 + 2.0
    assert np.allclose(derivative(values, x[1] - x[0]), expected, atol=1e-9)


@pytest.mark.parametrize("order, tolerance", [(2, 2e-3), (4, 1e-6)])
def test_smooth_function(order, tolerance):
    x = np.linspace(0.0, 2.0, 64)
    error = np.abs(derivative(np.sin(x), x[1] - x[0], order=order) - np.cos(x))
    assert np.max(error) < tolerance


def test_error_shrinks_at_fourth_order():
    errors = []
    for n in (33, 65):
        x = np.linspace(0.0, 1.0, n)
        errors.append(np.max(np.abs(derivative(np.exp(x), x[1] - x[0]) - np.exp(x))))
    assert errors[0] / errors[1] > 10.0


def test_axes_and_trailing_dimensions():
    u = np.linspace(0.0, 1.0, 9)
    v = np.linspace(0.0, 2.0, 11)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    field = np.stack([uu ** 2 * vv, vv ** 3], axis=-1)
    d_u, d_v = grid_gradient(field, u[1] - u[0], v[1] - v[0])
    assert d_u.shape == field.shape
    assert np.allclose(d_u[..., 0], 2.0 * uu * vv)
    assert np.allclose(d_v[..., 1], 3.0 * vv ** 2)


def test_short_axes_fall_back_to_gradient():
    assert np.allclose(derivative(np.array([0.0, 1.0, 4.0]), 1.0), [0.0, 2.0, 4.0])
    assert np.allclose(derivative(np.array([1.0, 3.0]), 0.5), [4.0, 4.0])


@pytest.mark.parametrize("values, order", [(np.ones(1), 4), (np.ones(8), 3)])
def test_stencil_errors(values, order):
    with pytest.raises(StencilError):
        derivative(values, 0.1, order=order)


def test_edge_mask():
    mask = edge_mask((6, 7))
    assert mask[:2].all() and mask[-2:].all()
    assert mask[:, :2].all() and mask[:, -2:].all()
    assert not mask[2:4, 2:5].any()
    narrow = edge_mask((6, 7), order=2)
    assert narrow.sum() == 6 * 7 - 4 * 5


@pytest.mark.parametrize("coarse, fine, floor, expected", [
    (1e-4, 1e-5, 0.0, (10.0, True)),
    (1e-4, 5e-5, 0.0, (2.0, False)),
    (1e-12, 1e-12, 1e-10, (1.0, True)),
    (0.0, 0.0, 0.0, (1.0, True)),
])
def test_convergence_ratio(coarse, fine, floor, expected):
    ratio, passed = convergence_ratio(coarse, fine, floor)
    assert ratio == pytest.approx(expected[0])
    assert passed is expected[1]
