"""
Tests for spinor transport and immersion reconstruction along grid paths.
"""

import math

import numpy as np
import pytest

from spinframe.cli.scene import load_abstract
from spinframe.compat import AbstractData
from spinframe.exceptions import (BaseFrameError, ChartExit, CompatGateFailed, GridMismatch,
                                  SpinorVanishes)
from spinframe.exprparse import parse
from spinframe.integrate import (adapted_frame, compare_up_to_base_alignment, midpoints,
                                 reconstruct_immersion, rk4_line, transport_spinor)
from spinframe.spinfield import SpinGeometryFactory, killing_residual
from spinframe.surface import SurfaceScene, extract
from tests.utils import fixture_path, random_vertical


def slice_fields(denominator="1 + (u^2 + v^2)/4"):
    conformal = f"1/({denominator})^2"
    fields = {"g11": conformal, "g12": "0", "g22": conformal, "a11": "0", "a12": "0",
              "a22": "0", "t1": "0", "t2": "0", "f": "1"}
    return {k: parse(v) for k, v in fields.items()}


@pytest.fixture
def abstract_slice(s2xr):
    grid = np.linspace(-0.5, 0.5, 32)
    return AbstractData.from_expressions(s2xr, grid, grid, slice_fields())


@pytest.fixture
def flat_in_round_base(s2xr):
    grid = np.linspace(-0.5, 0.5, 16)
    fields = slice_fields("1")
    return AbstractData.from_expressions(s2xr, grid, grid, fields)


class TestLineIntegration:
    """The building blocks of the path integrators."""

    def test_midpoints_exact_for_cubics(self):
        t = np.arange(9, dtype=float)
        expected = (t[:-1] + 0.5) ** 3 - 2.0 * (t[:-1] + 0.5)
        assert np.allclose(midpoints(t ** 3 - 2.0 * t), expected)

    def test_midpoints_short_axis(self):
        values = np.array([[0.0, 2.0], [4.0, 6.0], [8.0, 10.0]])
        assert np.allclose(midpoints(values, axis=0), [[2.0, 4.0], [6.0, 8.0]])
        assert midpoints(values, axis=1).shape == (3, 1)

    def test_rk4_exponential(self):
        states = rk4_line(lambda y, k, where: y, 1.0, 11, 0.1)
        assert len(states) == 11
        assert states[-1] == pytest.approx(math.e, rel=1e-5)

    def test_rk4_tuple_state_and_hook(self):
        seen = []

        def hook(state, k):
            seen.append(k)
            return state

        states = rk4_line(lambda y, k, where: (np.ones(2), -y[1]), (np.zeros(2), np.ones(2)),
                          5, 0.25, hook)
        assert seen == [1, 2, 3, 4]
        assert np.allclose(states[-1][0], 1.0)
        assert np.allclose(states[-1][1], math.exp(-1.0), rtol=1e-3)


class TestTransport:
    """Spinor transport by the generalized Killing equations."""

    def test_vertical_plane_keeps_constant_spinor(self, vertical_plane_scene, nil3):
        data = extract(vertical_plane_scene).to_abstract()
        geometry = SpinGeometryFactory.default_for(nil3)
        result = transport_spinor(data, [0.6, 0.0, 0.8, 0.0], geometry)
        assert result.holonomy_defect < 1e-12
        assert np.allclose(result.field.values, [0.6, 0.8], atol=1e-12)
        assert result.norm_drift < 1e-12

    def test_slice_of_s2xr(self, slice_scene, s2xr):
        data = extract(slice_scene).to_abstract()
        geometry = SpinGeometryFactory.default_for(s2xr)
        result = transport_spinor(data, [1.0, 0.0, 0.0, 0.0], geometry)
        assert result.holonomy_defect < 1e-5
        assert result.norm_drift < 1e-5
        assert np.allclose(result.field.values[0, 0], [1.0, 0.0])
        interior = killing_residual(result.field, data)[2:-2, 2:-2]
        assert np.max(interior) < 1e-4

    def test_imaginary_eta_keeps_spinor_away_from_zero(self, h2xr):
        scene = SurfaceScene.from_strings(h2xr, "u", "v", "0", [[-0.5, 0.5], [-0.5, 0.5]],
                                          [24, 24])
        data = extract(scene).to_abstract()
        result = transport_spinor(data, [0.0, 0.0, 1.0, 0.0],
                                  SpinGeometryFactory.default_for(h2xr))
        assert result.min_norm > 0.1
        assert result.holonomy_defect < 1e-5

    def test_result_dict(self, vertical_plane_scene, nil3):
        data = extract(vertical_plane_scene.with_grid(8, 8)).to_abstract()
        result = transport_spinor(data, [0.6, 0.0, 0.8, 0.0], SpinGeometryFactory.default_for(nil3))
        summary = result.to_dict()
        assert summary["seed"] == [0.6, 0.0, 0.8, 0.0]
        assert summary["geometry"]["tag"] == "fibration"
        assert set(summary) == {"geometry", "seed", "holonomy_defect", "norm_drift", "min_norm"}

    def test_gate_refuses_incompatible_data(self, flat_in_round_base, s2xr):
        geometry = SpinGeometryFactory.default_for(s2xr)
        with pytest.raises(CompatGateFailed) as info:
            transport_spinor(flat_in_round_base, [1.0, 0.0, 0.0, 0.0], geometry)
        assert info.value.details["name"] == "gauss"
        ungated = transport_spinor(flat_in_round_base, [1.0, 0.0, 0.0, 0.0], geometry,
                                   gate=math.inf)
        assert ungated.holonomy_defect > 1e-4

    def test_ungated_gauss_violation_shows_holonomy(self, s2xr):
        data = load_abstract(fixture_path("gauss_violating")).data
        result = transport_spinor(data, [1.0, 0.0, 0.0, 0.0],
                                  SpinGeometryFactory.default_for(s2xr), gate=math.inf)
        assert result.holonomy_defect > 1e-3

    def test_zero_seed(self, abstract_slice, s2xr):
        with pytest.raises(SpinorVanishes):
            transport_spinor(abstract_slice, [0.0, 0.0, 0.0, 0.0],
                             SpinGeometryFactory.default_for(s2xr))


class TestReconstruction:
    """Rebuilding immersions with the Gauss-Weingarten system."""

    def test_abstract_slice(self, abstract_slice):
        result = reconstruct_immersion(abstract_slice, [-0.5, -0.5, 0.0])
        uu, vv = np.meshgrid(abstract_slice.u, abstract_slice.v, indexing="ij")
        reference = np.stack([uu, vv, np.zeros_like(uu)], axis=-1)
        assert compare_up_to_base_alignment(result.points, reference) < 1e-5
        assert result.path_defect < 1e-5
        assert result.vertical_defect < 1e-6
        assert result.frame_drift < 1e-6

    def test_scene_round_trip(self, graph_scene):
        data = extract(graph_scene)
        result = reconstruct_immersion(data.to_abstract(), data.points[0, 0],
                                       data.frame_chart[0, 0])
        assert compare_up_to_base_alignment(result.points, data.points) < 1e-5
        assert np.allclose(result.frames, data.frame, atol=1e-5)

    def test_vertical_cylinder_round_trip(self, berger_cylinder_scene):
        data = extract(berger_cylinder_scene)
        result = reconstruct_immersion(data.to_abstract(), data.points[0, 0],
                                       data.frame_chart[0, 0])
        assert compare_up_to_base_alignment(result.points, data.points) < 1e-5

    def test_round_trip_converges(self, berger_cylinder_scene):
        errors = []
        for n in (17, 33):
            data = extract(berger_cylinder_scene.with_grid(n, n))
            result = reconstruct_immersion(data.to_abstract(), data.points[0, 0],
                                           data.frame_chart[0, 0], gate=math.inf)
            errors.append(compare_up_to_base_alignment(result.points, data.points))
        assert errors[0] / max(errors[1], 1e-13) >= 8.0, errors

    def test_gate(self, flat_in_round_base):
        with pytest.raises(CompatGateFailed):
            reconstruct_immersion(flat_in_round_base, [0.0, 0.0, 0.0])

    @pytest.mark.parametrize("frame", [
        2.0 * np.eye(3),
        np.diag([1.0, 1.0, -1.0]),
        [[1.0, 0.0, 0.0], [0.0, math.cos(0.3), math.sin(0.3)], [0.0, -math.sin(0.3), math.cos(0.3)]],
    ])
    def test_invalid_base_frame(self, abstract_slice, frame):
        with pytest.raises(BaseFrameError):
            reconstruct_immersion(abstract_slice, [0.0, 0.0, 0.0], frame)

    def test_base_outside_chart(self, h2xr):
        grid = np.linspace(-0.3, 0.3, 12)
        data = AbstractData.from_expressions(h2xr, grid, grid, slice_fields("1 - (u^2 + v^2)/4"))
        with pytest.raises(ChartExit):
            reconstruct_immersion(data, [3.0, 0.0, 0.0])


def test_adapted_frame(rng):
    T, f = random_vertical(rng, (50,))
    for t, ff in zip(T, f):
        R = adapted_frame(t, ff)
        assert np.allclose(R @ R.T, np.eye(3))
        assert np.linalg.det(R) == pytest.approx(1.0)
        assert np.allclose(np.array([t[0], t[1], ff]) @ R, [0.0, 0.0, 1.0])
    assert np.allclose(adapted_frame([0.0, 0.0], -1.0)[2], [0.0, 0.0, -1.0])


def test_compare_up_to_base_alignment(rng):
    F = rng.normal(size=(6, 7, 3))
    assert compare_up_to_base_alignment(F, F + np.array([0.0, 0.0, 5.0])) == pytest.approx(0.0)
    assert compare_up_to_base_alignment(F, F + np.array([0.1, 0.0, 0.0])) == pytest.approx(0.1)
    with pytest.raises(GridMismatch):
        compare_up_to_base_alignment(F, F[:, :-1])


def test_base_alignment_defect_is_linear(abstract_slice):
    uu, vv = np.meshgrid(abstract_slice.u, abstract_slice.v, indexing="ij")
    F = np.stack([uu, vv, np.zeros_like(uu)], axis=-1)
    bump = np.stack([uu ** 2, uu * vv, uu + vv], axis=-1)
    steps = np.array([1e-4, 1e-3, 1e-2])
    defects = np.array([compare_up_to_base_alignment(F, F + eps * bump) for eps in steps])
    assert np.allclose(defects[1:] / defects[:-1], 10.0, rtol=1e-6)
    assert np.allclose(defects / steps, defects[0] / steps[0], rtol=1e-6)
