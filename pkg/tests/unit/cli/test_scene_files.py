"""
Tests for scene and abstract-data documents.
"""

import hashlib

import numpy as np
import pytest

from spinframe.cli.scene import (is_abstract, load_abstract, load_scene, parse_grid,
                                 parse_parameters, read_document, substitute)
from spinframe.exceptions import ExpressionSyntaxError, ModelSpaceError, SceneFormatError
from spinframe.exprparse import parse, to_source
from tests.utils import fixture_path, load_fixture, write_json


def test_substitute():
    assert substitute("$c*u*v", {"c": 0.2}, "surface.z") == "(0.2)*u*v"
    assert substitute(2, {}, "surface.z") == "2.0"
    with pytest.raises(SceneFormatError) as info:
        substitute("$d*u", {"c": 0.2}, "surface.z")
    assert info.value.details["parameter"] == "d"
    with pytest.raises(SceneFormatError):
        substitute(["u"], {}, "surface.x")


def test_parse_options():
    assert parse_parameters(["c=0.5", " r = 2"]) == {"c": 0.5, "r": 2.0}
    assert parse_parameters(None) == {}
    assert parse_grid("48") == (48, 48)
    assert parse_grid("32x40") == (32, 40)
    assert parse_grid(None) is None
    for bad in ("x", "3x4x5", "ten"):
        with pytest.raises(SceneFormatError):
            parse_grid(bad)
    with pytest.raises(SceneFormatError):
        parse_parameters(["c"])


def test_read_document_hash():
    path = fixture_path("slice_s2xr")
    document, digest = read_document(path)
    with open(path, "rb") as f:
        assert digest == hashlib.sha256(f.read()).hexdigest()
    assert not is_abstract(document)
    assert is_abstract(load_fixture("abstract_slice"))


def test_read_document_errors(tmp_path):
    with pytest.raises(SceneFormatError):
        read_document(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SceneFormatError):
        read_document(str(bad))
    array = tmp_path / "array.json"
    array.write_text("[1, 2]")
    with pytest.raises(SceneFormatError):
        read_document(str(array))


class TestLoadScene:
    """Scene documents."""

    def test_named_model_with_parameters(self):
        document = load_scene(fixture_path("nil3_graph"), grid=(8, 9))
        assert document.scene.model.name == "Nil3(0.5)"
        assert document.scene.grid == (8, 9)
        assert document.scene.expressions()["z"] == to_source(parse("0.2*u*v"))
        assert document.spinor is None

    def test_parameter_override(self):
        document = load_scene(fixture_path("berger_cylinder"), parameters={"r": 0.25})
        point = document.scene.evaluate(np.array(0.0), np.array(0.0))
        assert np.allclose(point, [0.25, 0.0, 0.0])

    def test_spinor_block(self):
        document = load_scene(fixture_path("nil3_vertical_plane"))
        assert document.spinor.geometry == "fibration"
        assert document.spinor.seed == (0.6, 0.0, 0.8, 0.0)
        assert document.scene.orientation == -1

    def test_eta_and_tolerances(self, tmp_path):
        doc = load_fixture("slice_s2xr")
        doc["spinor"]["eta"] = [0.0, 0.5]
        doc["tolerances"] = {"killing": 2e-5}
        doc["frame_rotation"] = 0.25
        document = load_scene(write_json(tmp_path, "scene.json", doc))
        assert document.spinor.eta == 0.5j
        assert document.tolerances == {"killing": 2e-5}
        assert document.frame_rotation == 0.25

    @pytest.mark.parametrize("change", [
        {"surface": {"x": "u", "y": "v"}},
        {"domain": {"u": [0, 1]}},
        {"grid": [1, 5]},
        {"orientation": 0},
        {"tolerances": {"killing": -1}},
        {"spinor": {"seed": [1, 0, 0, 0]}},
        {"spinor": {"geometry": "fibration", "seed": [1, 0]}},
        {"parameters": {"c": "big"}},
    ])
    def test_format_errors(self, tmp_path, change):
        doc = dict(load_fixture("nil3_graph"), **change)
        with pytest.raises(SceneFormatError):
            load_scene(write_json(tmp_path, "scene.json", doc))

    def test_model_errors(self, tmp_path):
        doc = dict(load_fixture("slice_s2xr"), model={"kappa": 0, "tau": 0})
        with pytest.raises(ModelSpaceError):
            load_scene(write_json(tmp_path, "scene.json", doc))

    def test_malformed_expression(self):
        with pytest.raises(ExpressionSyntaxError) as info:
            load_scene(fixture_path("malformed_expression"))
        assert info.value.offset == 5

    def test_abstract_file_is_not_a_scene(self):
        with pytest.raises(SceneFormatError):
            load_scene(fixture_path("abstract_slice"))


class TestLoadAbstract:
    """Abstract-data documents."""

    def test_slice(self, default_config):
        document = load_abstract(fixture_path("abstract_slice"), grid=(12, 12),
                                 config=default_config)
        assert document.data.shape == (12, 12)
        assert document.reference.shape == (12, 12, 3)
        assert np.allclose(document.reference[0, 0], [-0.5, -0.5, 0.0])
        assert document.base is None
        assert document.spinor.geometry == "product-eta-half"

    def test_base_block(self):
        document = load_abstract(fixture_path("outside_chart"))
        assert np.array_equal(document.base, [3.0, 0.0, 0.0])
        assert document.base_frame is None

    def test_missing_fields(self, tmp_path):
        doc = load_fixture("gauss_violating")
        del doc["fields"]["f"]
        with pytest.raises(SceneFormatError):
            load_abstract(write_json(tmp_path, "abstract.json", doc))

    def test_bad_base_frame(self, tmp_path):
        doc = load_fixture("gauss_violating")
        doc["base"]["frame"] = [[1, 0, 0], [0, 1, 0]]
        with pytest.raises(SceneFormatError):
            load_abstract(write_json(tmp_path, "abstract.json", doc))

    def test_scene_is_not_abstract(self):
        with pytest.raises(SceneFormatError):
            load_abstract(fixture_path("slice_s2xr"))
