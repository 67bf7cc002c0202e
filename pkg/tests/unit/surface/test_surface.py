"""
Tests for surface scenes and extraction of their extrinsic data.
"""

import math

import numpy as np
import pytest

from spinframe.ambient import frames
from spinframe.clifford import TangentVec2
from spinframe.exceptions import (ChartDomainError, ExpressionSyntaxError, ImmersionDegenerate,
                                  SceneFormatError)
from spinframe.surface import (SurfaceScene, extract, intrinsic_connection, point_geometry,
                               rotate_J, shape_operator, tangent_frame, vertical_split)

SQUARE = [[-0.5, 0.5], [-0.5, 0.5]]


class TestSurfaceScene:
    """Construction and validation of scenes."""

    def test_grid_values(self, slice_scene):
        assert slice_scene.u_values[0] == -0.5
        assert slice_scene.u_values[-1] == 0.5
        assert slice_scene.spacing == pytest.approx((1.0 / 31, 1.0 / 31))
        assert slice_scene.evaluate().shape == (32, 32, 3)
        assert slice_scene.expressions() == {"x": "u", "y": "v", "z": "0"}

    @pytest.mark.parametrize("grid, domain, orientation", [
        ([1, 8], SQUARE, 1),
        ([8, 8], [[0.5, 0.5], [0.0, 1.0]], 1),
        ([8, 8], SQUARE, 2),
    ])
    def test_invalid_scene(self, s2xr, grid, domain, orientation):
        with pytest.raises(SceneFormatError):
            SurfaceScene.from_strings(s2xr, "u", "v", "0", domain, grid, orientation)

    def test_malformed_expression(self, s2xr):
        with pytest.raises(ExpressionSyntaxError):
            SurfaceScene.from_strings(s2xr, "sin(u", "v", "0", SQUARE, [8, 8])

    def test_chart_exit_is_located(self, h2xr):
        scene = SurfaceScene.from_strings(h2xr, "u", "v", "0", [[0.0, 3.0], [0.0, 0.1]], [7, 2])
        with pytest.raises(ChartDomainError) as info:
            scene.validate()
        i, j = info.value.details["index"]
        assert info.value.details["u"] == pytest.approx(scene.u_values[i])
        assert info.value.details["u"] >= 1.5
        assert j == 0

    def test_with_grid_and_orientation(self, slice_scene):
        assert slice_scene.with_grid(8, 9).grid == (8, 9)
        assert slice_scene.with_orientation(-1).orientation == -1


class TestPointGeometry:
    """Exact extrinsic data at single parameter points."""

    def test_horizontal_slice(self, slice_scene):
        geo = point_geometry(slice_scene, 0.2, -0.1)
        assert np.allclose(geo.A, 0.0, atol=1e-12)
        assert geo.f == pytest.approx(1.0)
        assert np.allclose(geo.T, 0.0)
        assert np.allclose(geo.frame, np.eye(3), atol=1e-12)

    def test_vertical_plane(self, vertical_plane_scene):
        geo = point_geometry(vertical_plane_scene, 0.3, 0.1)
        assert geo.f == pytest.approx(0.0, abs=1e-12)
        assert np.linalg.norm(geo.T) == pytest.approx(1.0)
        assert geo.H == pytest.approx(0.0, abs=1e-12)
        assert geo.area < 0.0

    def test_graph_shape_operator_is_symmetric(self, graph_scene):
        geo = point_geometry(graph_scene, 0.25, -0.4)
        assert geo.asymmetry < 1e-10
        assert np.allclose(geo.A, geo.A.T)

    def test_frame_rotation(self, graph_scene):
        angle = 0.7
        plain = point_geometry(graph_scene, 0.1, 0.2)
        rotated = point_geometry(graph_scene, 0.1, 0.2, frame_rotation=angle)
        c, s = math.cos(angle), math.sin(angle)
        R = np.array([[c, s], [-s, c]])
        assert rotated.H == pytest.approx(plain.H)
        assert rotated.f == pytest.approx(plain.f)
        assert np.allclose(rotated.A, R @ plain.A @ R.T)
        assert np.allclose(rotated.T, R @ plain.T)
        assert np.allclose(rotated.frame[2], plain.frame[2])

    def test_degenerate_immersion(self, s2xr):
        scene = SurfaceScene.from_strings(s2xr, "u", "u", "0", SQUARE, [8, 8])
        with pytest.raises(ImmersionDegenerate) as info:
            point_geometry(scene, 0.1, 0.1)
        assert info.value.details["det"] == pytest.approx(0.0, abs=1e-12)

    def test_accessors(self, graph_scene, nil3):
        E1, E2, nu = tangent_frame(graph_scene, 0.1, -0.2)
        g = frames.metric_at(nil3, E1.point.as_array())
        gram = np.array([[a.components @ g @ b.components for b in (E1, E2, nu)]
                         for a in (E1, E2, nu)])
        assert np.allclose(gram, np.eye(3), atol=1e-12)
        A, H = shape_operator(graph_scene, 0.1, -0.2)
        assert H == pytest.approx(0.5 * np.trace(A))
        T, f = vertical_split(graph_scene, 0.1, -0.2)
        assert isinstance(T, TangentVec2)
        assert T.components @ T.components + f * f == pytest.approx(1.0)

    def test_intrinsic_connection_of_slice(self, slice_scene):
        _, _, K = intrinsic_connection(slice_scene, 0.0, 0.1)
        assert K == pytest.approx(1.0, abs=1e-5)
        _, _, K_edge = intrinsic_connection(slice_scene, 0.5, 0.5)
        assert K_edge == pytest.approx(1.0, abs=1e-4)


def test_rotate_J():
    assert np.array_equal(rotate_J(np.array([1.0, 0.0])), [0.0, 1.0])
    assert np.allclose(rotate_J(rotate_J(TangentVec2(np.array([0.3, 2.0])))).components,
                       [-0.3, -2.0])


class TestExtract:
    """Extraction over a whole grid."""

    def test_slice_of_s2xr(self, slice_scene, default_config):
        data = extract(slice_scene, config=default_config)
        assert data.A.shape == (32, 32, 2, 2)
        assert np.max(np.abs(data.H)) < 1e-12
        assert np.allclose(data.f, 1.0)
        assert np.max(np.abs(data.K - 1.0)) < 1e-4
        assert np.max(data.unit_defect()) < 1e-12

    def test_vertical_plane_is_flat(self, vertical_plane_scene):
        data = extract(vertical_plane_scene)
        assert np.max(np.abs(data.K)) < 1e-8
        assert np.max(np.abs(data.f)) < 1e-12
        assert np.max(np.abs(data.H)) < 1e-12

    def test_vertical_cylinder(self, berger_cylinder_scene):
        data = extract(berger_cylinder_scene)
        assert np.max(np.abs(data.f)) < 1e-12
        assert np.max(np.abs(data.K)) < 1e-5

    def test_frame_rotation_keeps_invariants(self, graph_scene):
        plain = extract(graph_scene)
        rotated = extract(graph_scene, frame_rotation=0.4)
        assert np.allclose(plain.H, rotated.H)
        assert np.allclose(plain.K, rotated.K)
        assert np.allclose(plain.f, rotated.f)

    def test_summary(self, graph_scene):
        summary = extract(graph_scene.with_grid(8, 8)).summary()
        assert set(summary) == {"H", "f", "T_norm", "K", "unit_defect", "shape_asymmetry"}
        assert summary["f"][0] <= summary["f"][1]

    def test_degenerate_grid_point_is_indexed(self, s2xr):
        scene = SurfaceScene.from_strings(s2xr, "u", "u*v", "0", SQUARE, [5, 5])
        with pytest.raises(ImmersionDegenerate) as info:
            extract(scene)
        assert info.value.details["index"] == [2, 0]

    def test_to_abstract(self, slice_scene):
        abstract = extract(slice_scene).to_abstract()
        assert abstract.model == slice_scene.model
        assert abstract.A.shape == (32, 32, 2, 2)
