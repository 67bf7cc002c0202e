"""
Scene Files

Loading of the JSON scene and abstract-data documents read by the command
line. Expression strings may reference named parameters as `$name`; values
come from the document's "parameters" object and from --param options.
"""

import hashlib
import json
import logging
import re
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from spinframe.ambient.model_space import ModelFactory, ModelSpace
from spinframe.compat import AbstractData
from spinframe.exceptions import SceneFormatError
from spinframe.exprparse import parse
from spinframe.surface import MAX_GRID, SurfaceScene

logger = logging.getLogger(__name__)

PARAMETER = re.compile(r"\$([A-Za-z_][A-Za-z0-9_]*)")

ABSTRACT_FIELDS = ("g11", "g12", "g22", "a11", "a12", "a22", "t1", "t2", "f")


@dataclass
class SpinorSpec:
    geometry: str
    seed: Tuple[float, float, float, float]
    eta: Optional[complex] = None


@dataclass
class SceneDocument:
    """
    A parsed scene file.

    Attributes:
        path: Source path
        sha256: Hash of the file bytes
        scene: Surface scene
        spinor: Optional spinor block
        tolerances: Tolerance overrides of the file
        frame_rotation: Constant rotation of the extracted frame
    """

    path: str
    sha256: str
    scene: SurfaceScene
    spinor: Optional[SpinorSpec] = None
    tolerances: Dict[str, float] = field(default_factory=dict)
    frame_rotation: float = 0.0


@dataclass
class AbstractDocument:
    """
    A parsed abstract-data file.

    Attributes:
        path: Source path
        sha256: Hash of the file bytes
        data: Abstract data on the grid
        base: Chart base point, or None
        base_frame: Chart rows E1, E2, nu at the base, or None
        reference: Reference immersion on the grid, shape (nu, nv, 3), or None
        spinor: Optional spinor block
        tolerances: Tolerance overrides of the file
    """

    path: str
    sha256: str
    data: AbstractData
    base: Optional[np.ndarray] = None
    base_frame: Optional[np.ndarray] = None
    reference: Optional[np.ndarray] = None
    spinor: Optional[SpinorSpec] = None
    tolerances: Dict[str, float] = field(default_factory=dict)


def read_document(path: str) -> Tuple[Dict[str, Any], str]:
    """
    Read a JSON document and the sha256 of its bytes.

    Raises:
        SceneFormatError: If the file is missing or not a JSON object
    """
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except OSError as e:
        raise SceneFormatError(f"Cannot read {path}: {e.strerror}", {"path": path}) from e
    try:
        document = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise SceneFormatError(f"{path} is not valid JSON: {e}", {"path": path}) from e
    if not isinstance(document, dict):
        raise SceneFormatError(f"{path} must contain a JSON object", {"path": path})
    return document, hashlib.sha256(raw).hexdigest()


def is_abstract(document: Mapping[str, Any]) -> bool:
    return "fields" in document and "surface" not in document


def parse_parameters(pairs: Optional[Sequence[str]]) -> Dict[str, float]:
    """Parse name=value option strings."""
    result = {}
    for pair in pairs or ():
        name, sep, value = pair.partition("=")
        name = name.strip()
        if not sep or not name:
            raise SceneFormatError(f"Expected name=value, got {pair!r}")
        try:
            result[name] = float(value)
        except ValueError as e:
            raise SceneFormatError(f"Parameter {name} is not a number: {value!r}") from e
    return result


def substitute(text: Any, parameters: Mapping[str, float], where: str) -> str:
    """
    Replace `$name` references in an expression string.

    Raises:
        SceneFormatError: If the value is not a string or a parameter is unknown
    """
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return repr(float(text))
    if not isinstance(text, str):
        raise SceneFormatError(f"{where} must be an expression string, got {type(text).__name__}")

    def lookup(match):
        name = match.group(1)
        if name not in parameters:
            raise SceneFormatError(f"Unknown parameter ${name} in {where}", {"parameter": name})
        return f"({parameters[name]!r})"

    return PARAMETER.sub(lookup, text)


def _parameters(document: Mapping[str, Any], overrides: Optional[Mapping[str, float]]) -> Dict[str, float]:
    declared = document.get("parameters", {})
    if not isinstance(declared, dict):
        raise SceneFormatError("parameters must be an object")
    try:
        parameters = {str(k): float(v) for k, v in declared.items()}
    except (TypeError, ValueError) as e:
        raise SceneFormatError(f"Parameter values must be numbers: {e}") from e
    parameters.update(overrides or {})
    return parameters


def _domain(document: Mapping[str, Any]) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    domain = document.get("domain")
    try:
        (u0, u1), (v0, v1) = domain["u"], domain["v"]
        return (float(u0), float(u1)), (float(v0), float(v1))
    except (KeyError, TypeError, ValueError) as e:
        raise SceneFormatError('domain must be {"u": [a, b], "v": [c, d]}') from e


def _grid(document: Mapping[str, Any], override: Optional[Tuple[int, int]]) -> Tuple[int, int]:
    if override is not None:
        grid = override
    else:
        grid = document.get("grid", [64, 64])
        if isinstance(grid, int):
            grid = [grid, grid]
    try:
        nu, nv = (int(n) for n in grid)
    except (TypeError, ValueError) as e:
        raise SceneFormatError(f"grid must be [nu, nv], got {grid!r}") from e
    if not (2 <= nu <= MAX_GRID and 2 <= nv <= MAX_GRID):
        raise SceneFormatError(f"Grid must lie in [2, {MAX_GRID}]^2, got {[nu, nv]}")
    return nu, nv


def _orientation(document: Mapping[str, Any]) -> int:
    orientation = document.get("orientation", 1)
    if orientation not in (1, -1):
        raise SceneFormatError(f"orientation must be +1 or -1, got {orientation!r}")
    return int(orientation)


def _tolerances(document: Mapping[str, Any]) -> Dict[str, float]:
    tolerances = document.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise SceneFormatError("tolerances must be an object")
    for name, value in tolerances.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
            raise SceneFormatError(f"Tolerance {name} must be a positive number, got {value!r}")
    return {str(k): float(v) for k, v in tolerances.items()}


def _spinor(document: Mapping[str, Any]) -> Optional[SpinorSpec]:
    block = document.get("spinor")
    if block is None:
        return None
    if not isinstance(block, dict) or "geometry" not in block:
        raise SceneFormatError('spinor must be {"geometry": tag, "seed": [re1, im1, re2, im2]}')
    seed = block.get("seed", [1.0, 0.0, 0.0, 0.0])
    try:
        values = tuple(float(s) for s in seed)
    except (TypeError, ValueError) as e:
        raise SceneFormatError(f"spinor seed must be four numbers, got {seed!r}") from e
    if len(values) != 4:
        raise SceneFormatError(f"spinor seed must be four numbers, got {len(values)}")
    eta = block.get("eta")
    if eta is not None:
        try:
            eta = complex(eta[0], eta[1]) if isinstance(eta, list) else complex(float(eta))
        except (TypeError, ValueError, IndexError) as e:
            raise SceneFormatError(f"spinor eta must be a number or [re, im], got {eta!r}") from e
    return SpinorSpec(str(block["geometry"]), values, eta)


def _model(document: Mapping[str, Any], lambda_min: float) -> ModelSpace:
    if "model" not in document:
        raise SceneFormatError("Document lacks a model")
    return ModelFactory.from_dict(document["model"], lambda_min)


def load_scene(path: str, grid: Optional[Tuple[int, int]] = None,
               parameters: Optional[Mapping[str, float]] = None,
               lambda_min: float = 1e-3) -> SceneDocument:
    """
    Load a scene file.

    Args:
        path: JSON scene file
        grid: Grid override (nu, nv)
        parameters: Parameter overrides
        lambda_min: Chart clamp of the conformal factor

    Returns:
        SceneDocument

    Raises:
        SceneFormatError: On a malformed document
        ModelSpaceError: On an invalid model
        ExpressionSyntaxError: On a malformed expression
    """
    document, digest = read_document(path)
    if is_abstract(document):
        raise SceneFormatError(f"{path} holds abstract data, not a scene")
    return scene_from_document(document, path, digest, grid, parameters, lambda_min)


def scene_from_document(document: Mapping[str, Any], path: str = "<scene>", digest: str = "",
                        grid: Optional[Tuple[int, int]] = None,
                        parameters: Optional[Mapping[str, float]] = None,
                        lambda_min: float = 1e-3) -> SceneDocument:
    surface = document.get("surface")
    if not isinstance(surface, dict) or not all(k in surface for k in ("x", "y", "z")):
        raise SceneFormatError('surface must be {"x": ..., "y": ..., "z": ...}')
    values = _parameters(document, parameters)
    model = _model(document, lambda_min)
    exprs = [parse(substitute(surface[k], values, f"surface.{k}")) for k in ("x", "y", "z")]
    scene = SurfaceScene(model, *exprs, _domain(document), _grid(document, grid),
                         _orientation(document))
    try:
        rotation = float(document.get("frame_rotation", 0.0))
    except (TypeError, ValueError) as e:
        raise SceneFormatError("frame_rotation must be a number") from e
    logger.debug(f"Loaded scene {path}: {scene.expressions()} in {model.name}")
    return SceneDocument(path, digest, scene, _spinor(document), _tolerances(document), rotation)


def _vector(value: Any, shape: Tuple[int, ...], what: str) -> np.ndarray:
    try:
        array = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise SceneFormatError(f"{what} must be numeric") from e
    if array.shape != shape:
        raise SceneFormatError(f"{what} must have shape {list(shape)}, got {list(array.shape)}")
    return array


def load_abstract(path: str, grid: Optional[Tuple[int, int]] = None,
                  parameters: Optional[Mapping[str, float]] = None,
                  config: Optional[Dict[str, Any]] = None) -> AbstractDocument:
    """
    Load an abstract-data file.

    The document holds "model", "domain", "grid", "orientation" and "fields"
    (expression strings for g11, g12, g22, a11, a12, a22, t1, t2, f), with
    optional "base" ({"point": [x, y, z], "frame": 3x3 chart rows}) and
    "reference" ({"x", "y", "z"} expressions of a known immersion).

    Raises:
        SceneFormatError: On a malformed document
        ModelSpaceError: On an invalid model
        ExpressionSyntaxError: On a malformed expression
    """
    numerics = (config or {}).get("numerics", {})
    lambda_min = float(numerics.get("lambda_min", 1e-3))
    fd_order = int(numerics.get("fd_order", 4))
    document, digest = read_document(path)
    if not is_abstract(document):
        raise SceneFormatError(f"{path} holds a scene, not abstract data")
    values = _parameters(document, parameters)
    model = _model(document, lambda_min)
    fields = document["fields"]
    if not isinstance(fields, dict):
        raise SceneFormatError("fields must be an object of expression strings")
    missing = [k for k in ABSTRACT_FIELDS if k not in fields]
    if missing:
        raise SceneFormatError(f"Abstract data lacks fields: {', '.join(missing)}")
    exprs = {k: parse(substitute(fields[k], values, f"fields.{k}")) for k in ABSTRACT_FIELDS}

    (u0, u1), (v0, v1) = _domain(document)
    if not (u0 < u1 and v0 < v1):
        raise SceneFormatError("Empty parameter domain")
    nu, nv = _grid(document, grid)
    u, v = np.linspace(u0, u1, nu), np.linspace(v0, v1, nv)
    data = AbstractData.from_expressions(model, u, v, exprs, _orientation(document), fd_order)

    base = base_frame = reference = None
    if "base" in document:
        block = document["base"]
        if not isinstance(block, dict) or "point" not in block:
            raise SceneFormatError('base must be {"point": [x, y, z], "frame": [[...], [...], [...]]}')
        base = _vector(block["point"], (3,), "base.point")
        if block.get("frame") is not None:
            base_frame = _vector(block["frame"], (3, 3), "base.frame")
    if "reference" in document:
        block = document["reference"]
        if not isinstance(block, dict) or not all(k in block for k in ("x", "y", "z")):
            raise SceneFormatError('reference must be {"x": ..., "y": ..., "z": ...}')
        scene = SurfaceScene(model, *(parse(substitute(block[k], values, f"reference.{k}"))
                                      for k in ("x", "y", "z")),
                             ((u0, u1), (v0, v1)), (nu, nv))
        reference = scene.evaluate()
    logger.debug(f"Loaded abstract data {path} on {nu}x{nv} grid in {model.name}")
    return AbstractDocument(path, digest, data, base, base_frame, reference,
                            _spinor(document), _tolerances(document))


def parse_grid(text: Optional[str]) -> Optional[Tuple[int, int]]:
    """Parse a --grid value: N or NxM."""
    if text is None:
        return None
    parts = text.lower().split("x")
    try:
        values = [int(p) for p in parts]
    except ValueError as e:
        raise SceneFormatError(f"--grid must be N or NxM, got {text!r}") from e
    if len(values) == 1:
        values = values * 2
    if len(values) != 2:
        raise SceneFormatError(f"--grid must be N or NxM, got {text!r}")
    return values[0], values[1]
