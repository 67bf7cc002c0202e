"""
Tests for the chart, the canonical frame and its connection.
"""

import numpy as np
import pytest

from spinframe.ambient import frames
from spinframe.ambient.curvature import christoffel_numeric, connection_numeric
from spinframe.ambient.model_space import AmbientPoint, AmbientVec, Basis, ModelFactory
from spinframe.exceptions import ChartDomainError, ModelSpaceError

MODELS = [(4.0, 1.0), (0.0, 0.5), (-1.0, 0.8), (1.0, 0.0), (-1.0, 0.0)]
FIBRATIONS = [(4.0, 1.0), (0.0, 0.5), (-1.0, 0.8)]


def random_points(rng, count, radius=1.0):
    xy = rng.uniform(-radius, radius, size=(count, 2)) / np.sqrt(2.0)
    z = rng.uniform(-1.0, 1.0, size=(count, 1))
    return np.hstack([xy, z])


@pytest.mark.parametrize("kappa, tau", MODELS)
def test_canonical_frame_is_orthonormal(kappa, tau, rng):
    m = ModelFactory.create_model(kappa, tau)
    points = random_points(rng, 20)
    g = frames.metric_at(m, points)
    E = frames.frame_matrix(m, points)
    gram = np.einsum("...aj,...ab,...bk->...jk", E, g, E)
    assert np.allclose(gram, np.eye(3), atol=1e-12)
    theta = frames.coframe_matrix(m, points)
    assert np.allclose(theta @ E, np.eye(3), atol=1e-12)


def test_nil3_metric_in_chart(nil3):
    """ds^2 = dx^2 + dy^2 + (dz + tau (y dx - x dy))^2."""
    g = frames.metric_at(nil3, [1.0, 2.0, 0.3])
    expected = np.array([[1.0 + 0.25 * 4.0, -0.25 * 2.0, 0.5 * 2.0],
                         [-0.25 * 2.0, 1.0 + 0.25 * 1.0, -0.5 * 1.0],
                         [0.5 * 2.0, -0.5 * 1.0, 1.0]])
    assert np.allclose(g, expected)


def test_product_conformal_factor(s2xr):
    assert frames.conformal_factor(s2xr, 0.0, 0.0) == 1.0
    assert frames.conformal_factor(s2xr, 2.0, 0.0) == pytest.approx(0.5)


def test_chart_domain(h2xr):
    assert bool(frames.in_chart(h2xr, 1.0, 1.0))
    assert not bool(frames.in_chart(h2xr, 3.0, 0.0))
    with pytest.raises(ChartDomainError) as info:
        frames.metric_at(h2xr, [[0.0, 0.0, 0.0], [2.5, 0.0, 1.0]])
    assert info.value.details["index"] == [1]
    assert info.value.details["point"] == [2.5, 0.0, 1.0]
    assert info.value.details["chart_radius"] == pytest.approx(2.0)


def test_vertical_field_is_e3(berger):
    p = AmbientPoint(0.3, -0.2, 0.7)
    e1, e2, e3 = frames.canonical_frame(berger, p)
    xi = frames.vertical_field(berger, p)
    assert np.allclose(e3.components, xi.components)
    assert e1.basis is Basis.CHART


def test_basis_conversions(berger):
    p = AmbientPoint(0.3, -0.2, 0.7)
    v = AmbientVec(np.array([0.1, 2.0, -1.0]), Basis.FRAME, p)
    chart = frames.to_chart(berger, v)
    assert chart.basis is Basis.CHART
    assert np.allclose(frames.to_frame(berger, chart).components, v.components)
    with pytest.raises(ValueError):
        frames.to_chart(berger, AmbientVec(np.ones(3), Basis.FRAME))


def test_vector_product(nil3):
    p = AmbientPoint(0.5, 0.1, 0.0)
    e1, e2, e3 = frames.canonical_frame(nil3, p)
    product = frames.vector_product(e1, e2, nil3)
    assert np.allclose(product.components, e3.components)
    framed = frames.vector_product(AmbientVec(np.array([0.0, 1.0, 0.0]), Basis.FRAME, p),
                                   AmbientVec(np.array([0.0, 0.0, 1.0]), Basis.FRAME, p))
    assert np.allclose(framed.components, [1.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        frames.vector_product(e1, AmbientVec(np.ones(3), Basis.FRAME, p))
    with pytest.raises(ValueError):
        frames.vector_product(e1, e2)


@pytest.mark.parametrize("kappa, tau", FIBRATIONS)
def test_christoffel_closed_matches_numeric(kappa, tau, rng):
    """All 27 symbols on 100 random chart points."""
    m = ModelFactory.create_model(kappa, tau)
    worst = 0.0
    for p in random_points(rng, 100):
        numeric = connection_numeric(m, p)
        worst = max(worst, float(np.max(np.abs(numeric - frames.connection_table(m)))))
    assert worst <= 1e-6


@pytest.mark.parametrize("kappa", [1.0, -1.0])
def test_product_connection_matches_numeric(kappa, rng):
    m = ModelFactory.create_model(kappa, 0.0)
    for p in random_points(rng, 10):
        assert np.allclose(frames.connection_table(m, p), connection_numeric(m, p), atol=1e-6)


def test_christoffel_closed_values(nil3):
    assert frames.christoffel_closed(nil3, 1, 2, 3) == 0.5
    assert frames.christoffel_closed(nil3, 2, 1, 3) == -0.5
    assert frames.christoffel_closed(nil3, 3, 2, 1) == 0.5
    assert christoffel_numeric(nil3, [0.2, 0.1, 0.0], 1, 2, 3) == pytest.approx(0.5, abs=1e-6)


def test_christoffel_closed_rejects_products(s2xr):
    with pytest.raises(ModelSpaceError):
        frames.christoffel_closed(s2xr, 1, 2, 3)
    with pytest.raises(ValueError):
        frames.connection_table(s2xr)


def test_christoffel_index_range(nil3):
    with pytest.raises(ValueError):
        frames.christoffel_closed(nil3, 0, 1, 2)


@pytest.mark.parametrize("kappa, tau", FIBRATIONS)
def test_frame_brackets(kappa, tau):
    """[e1, e2] = 2 tau e3 and [e2, e3] = sigma e1."""
    m = ModelFactory.create_model(kappa, tau)
    p = [0.4, -0.3, 0.2]
    assert np.allclose(frames.frame_bracket(m, p, 1, 2), [0.0, 0.0, 2.0 * tau], atol=1e-12)
    assert np.allclose(frames.frame_bracket(m, p, 2, 3), [m.sigma, 0.0, 0.0], atol=1e-12)


def test_covariant_frame_contraction(berger):
    table = frames.connection_table(berger)
    V = np.array([1.0, 0.0, 0.0])
    W = np.array([0.0, 1.0, 0.0])
    assert np.allclose(frames.covariant_frame(table, V, W), table[0, 1])
