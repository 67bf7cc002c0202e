"""
Surface Extraction

Extrinsic geometry of a parametrized surface F(u, v) in a model space.

Every quantity that involves at most second derivatives of F (tangent frame,
normal, shape operator, the splitting of the vertical field and the
connection form) is read off exactly from 2-jets of the parametrization
composed with the chart coframe. Only the Gaussian curvature, a derivative
of the connection form, is obtained by finite differences over the grid.

Conventions: E1 = F_u / |F_u|, E2 completes a positively oriented frame of
the tangent plane after Gram-Schmidt, nu = E1 ^ E2; orientation -1 flips E2
and nu together. The shape operator is A X = -(nabla_X nu)^T so that
<A X, Y> = <nabla_X Y, nu>, H = tr(A) / 2, xi = T + f nu.
"""

import functools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from spinframe.ambient import frames
from spinframe.ambient.model_space import AmbientPoint, AmbientVec, Basis, ModelSpace
from spinframe.clifford import TangentVec2
from spinframe.exceptions import ChartDomainError, ImmersionDegenerate, SceneFormatError
from spinframe.exprparse import Expr, eval_jet2, eval_values, parse, to_source
from spinframe.exprparse.jets import Jet2
from spinframe.utils.batch_processor import grid_items, map_grid
from spinframe.utils.finite_differences import derivative

logger = logging.getLogger(__name__)

MAX_GRID = 4096


@dataclass(frozen=True)
class SurfaceScene:
    """
    Parametrized surface F(u, v) = (x, y, z) in the chart of a model space.

    Attributes:
        model: Ambient model space
        fx, fy, fz: Chart coordinates of F as expressions in u and v
        domain: ((u0, u1), (v0, v1))
        grid: Sample counts (nu, nv)
        orientation: +1 or -1, the sign of the normal
    """

    model: ModelSpace
    fx: Expr
    fy: Expr
    fz: Expr
    domain: Tuple[Tuple[float, float], Tuple[float, float]]
    grid: Tuple[int, int]
    orientation: int = 1

    def __post_init__(self):
        nu, nv = self.grid
        if not (2 <= nu <= MAX_GRID and 2 <= nv <= MAX_GRID):
            raise SceneFormatError(f"Grid must lie in [2, {MAX_GRID}]^2, got {list(self.grid)}")
        (u0, u1), (v0, v1) = self.domain
        if not (u0 < u1 and v0 < v1):
            raise SceneFormatError(f"Empty parameter domain {[list(self.domain[0]), list(self.domain[1])]}")
        if self.orientation not in (1, -1):
            raise SceneFormatError(f"Orientation must be +1 or -1, got {self.orientation}")

    @classmethod
    def from_strings(cls, model: ModelSpace, x: str, y: str, z: str,
                     domain: Sequence[Sequence[float]], grid: Sequence[int],
                     orientation: int = 1) -> "SurfaceScene":
        """Parse the three coordinate expressions and build a scene."""
        (u0, u1), (v0, v1) = domain
        return cls(model, parse(x), parse(y), parse(z),
                   ((float(u0), float(u1)), (float(v0), float(v1))),
                   (int(grid[0]), int(grid[1])), int(orientation))

    def with_grid(self, nu: int, nv: int) -> "SurfaceScene":
        return SurfaceScene(self.model, self.fx, self.fy, self.fz, self.domain, (nu, nv),
                            self.orientation)

    def with_orientation(self, orientation: int) -> "SurfaceScene":
        return SurfaceScene(self.model, self.fx, self.fy, self.fz, self.domain, self.grid,
                            orientation)

    @property
    def u_values(self) -> np.ndarray:
        return np.linspace(self.domain[0][0], self.domain[0][1], self.grid[0])

    @property
    def v_values(self) -> np.ndarray:
        return np.linspace(self.domain[1][0], self.domain[1][1], self.grid[1])

    @property
    def spacing(self) -> Tuple[float, float]:
        (u0, u1), (v0, v1) = self.domain
        return (u1 - u0) / (self.grid[0] - 1), (v1 - v0) / (self.grid[1] - 1)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.u_values, self.v_values, indexing="ij")

    def expressions(self) -> Dict[str, str]:
        return {"x": to_source(self.fx), "y": to_source(self.fy), "z": to_source(self.fz)}

    def evaluate(self, u=None, v=None) -> np.ndarray:
        """Chart points F(u, v), shape (..., 3); the grid by default."""
        if u is None:
            u, v = self.mesh()
        return np.stack([eval_values(e, u, v) for e in (self.fx, self.fy, self.fz)], axis=-1)

    def validate(self) -> np.ndarray:
        """
        Evaluate F on the grid and check every sample against the chart.

        Returns:
            Grid of chart points, shape (nu, nv, 3)

        Raises:
            EvaluationDomainError: An expression is undefined on the grid
            ChartDomainError: A sample leaves the chart, with its grid location
        """
        points = self.evaluate()
        ok = frames.in_chart(self.model, points[..., 0], points[..., 1])
        if not np.all(ok):
            i, j = (int(k) for k in np.argwhere(~ok)[0])
            u, v = float(self.u_values[i]), float(self.v_values[j])
            raise ChartDomainError(
                f"F({u:g}, {v:g}) = {points[i, j].tolist()} lies outside the chart of "
                f"{self.model.name}",
                {"index": [i, j], "u": u, "v": v, "point": points[i, j].tolist()})
        return points


@dataclass
class PointGeometry:
    """Extrinsic data of the surface at one parameter point."""

    u: float
    v: float
    point: np.ndarray
    frame: np.ndarray
    metric: np.ndarray
    M: np.ndarray
    P: np.ndarray
    A: np.ndarray
    asymmetry: float
    T: np.ndarray
    f: float
    omega_coord: np.ndarray
    omega: np.ndarray
    area: float

    @property
    def H(self) -> float:
        return 0.5 * float(np.trace(self.A))


def _jet_parts(entry) -> Tuple[float, float, float]:
    if isinstance(entry, Jet2):
        return entry.value, entry.du, entry.dv
    value = float(entry)
    return value, 0.0, 0.0


def _rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, s], [-s, c]])


def point_geometry(scene: SurfaceScene, u: float, v: float, frame_rotation: float = 0.0,
                   degenerate_det: float = 1e-12) -> PointGeometry:
    """
    Exact extrinsic data at (u, v) from 2-jets.

    Args:
        scene: Surface scene
        u, v: Parameter point
        frame_rotation: Constant angle by which (E1, E2) is rotated
        degenerate_det: Smallest accepted determinant of the induced metric

    Returns:
        PointGeometry with frame vectors in canonical-frame components

    Raises:
        ImmersionDegenerate: If dF has rank < 2 at (u, v)
        EvaluationDomainError: If an expression is undefined at (u, v)
    """
    m = scene.model
    jx, jy, jz = (eval_jet2(e, u, v) for e in (scene.fx, scene.fy, scene.fz))
    point = np.array([jx.value, jy.value, jz.value])

    theta = np.zeros((3, 3))
    theta_u = np.zeros((3, 3))
    theta_v = np.zeros((3, 3))
    for i, row in enumerate(frames.coframe_entries(m, jx, jy, jz)):
        for a, entry in enumerate(row):
            theta[i, a], theta_u[i, a], theta_v[i, a] = _jet_parts(entry)

    F_u = np.array([jx.du, jy.du, jz.du])
    F_v = np.array([jx.dv, jy.dv, jz.dv])
    F_uu = np.array([jx.duu, jy.duu, jz.duu])
    F_uv = np.array([jx.duv, jy.duv, jz.duv])
    F_vv = np.array([jx.dvv, jy.dvv, jz.dvv])

    # Frame components of d/du, d/dv and their ambient covariant derivatives.
    P_u = theta @ F_u
    P_v = theta @ F_v
    table = frames.connection_table(m, point)
    nabla_uu = theta_u @ F_u + theta @ F_uu + frames.covariant_frame(table, P_u, P_u)
    nabla_uv = theta_u @ F_v + theta @ F_uv + frames.covariant_frame(table, P_u, P_v)
    nabla_vu = theta_v @ F_u + theta @ F_uv + frames.covariant_frame(table, P_v, P_u)
    nabla_vv = theta_v @ F_v + theta @ F_vv + frames.covariant_frame(table, P_v, P_v)

    metric = np.array([[P_u @ P_u, P_u @ P_v], [P_v @ P_u, P_v @ P_v]])
    det = float(np.linalg.det(metric))
    if not det > degenerate_det:
        raise ImmersionDegenerate(
            f"Induced metric is degenerate at (u, v) = ({u:g}, {v:g}): det = {det:.3e}",
            {"u": u, "v": v, "det": det, "point": point.tolist()})

    norm_u = math.sqrt(metric[0, 0])
    e1 = P_u / norm_u
    w = P_v - (P_v @ e1) * e1
    e2 = scene.orientation * w / np.linalg.norm(w)
    nu = np.cross(e1, e2)

    # The connection form is unchanged by a constant rotation of the frame.
    omega_coord = np.array([nabla_uu @ e2, nabla_vu @ e2]) / norm_u

    tangent = _rotation(frame_rotation) @ np.stack([e1, e2])
    frame = np.stack([tangent[0], tangent[1], nu])
    P = np.stack([tangent @ P_u, tangent @ P_v])
    M = np.linalg.inv(P)

    h = np.array([[nabla_uu @ nu, nabla_uv @ nu], [nabla_vu @ nu, nabla_vv @ nu]])
    asymmetry = abs(h[0, 1] - h[1, 0])
    h_sym = 0.5 * (h + h.T)
    A = M @ h_sym @ M.T

    return PointGeometry(
        u=float(u),
        v=float(v),
        point=point,
        frame=frame,
        metric=metric,
        M=M,
        P=P,
        A=0.5 * (A + A.T),
        asymmetry=float(asymmetry),
        T=frame[:2, 2].copy(),
        f=float(nu[2]),
        omega_coord=omega_coord,
        omega=M @ omega_coord,
        area=scene.orientation * math.sqrt(det),
    )


def _chart_frame(m: ModelSpace, point: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """Rows of frame (canonical components) converted to chart components."""
    return np.einsum("...aj,...ij->...ia", frames.frame_matrix(m, point), frame)


def tangent_frame(scene: SurfaceScene, u: float, v: float,
                  degenerate_det: float = 1e-12) -> Tuple[AmbientVec, AmbientVec, AmbientVec]:
    """
    Orthonormal tangent frame and unit normal at (u, v), in chart components.

    Raises:
        ImmersionDegenerate: If the induced metric determinant is below degenerate_det
    """
    geo = point_geometry(scene, u, v, degenerate_det=degenerate_det)
    chart = _chart_frame(scene.model, geo.point, geo.frame)
    base = AmbientPoint.from_sequence(geo.point.tolist())
    return tuple(AmbientVec(chart[i], Basis.CHART, base) for i in range(3))


def shape_operator(scene: SurfaceScene, u: float, v: float) -> Tuple[np.ndarray, float]:
    """Shape operator in the frame (E1, E2) and the mean curvature tr(A) / 2."""
    geo = point_geometry(scene, u, v)
    return geo.A, geo.H


def vertical_split(scene: SurfaceScene, u: float, v: float) -> Tuple[TangentVec2, float]:
    """Tangential part T and normal component f of the vertical field, xi = T + f nu."""
    geo = point_geometry(scene, u, v)
    return TangentVec2(geo.T), geo.f


def _stencil_derivative(func, center: float, lower: float, upper: float, h: float) -> float:
    """Fourth-order derivative of func at center from five samples inside [lower, upper]."""
    if center - 2 * h >= lower and center + 2 * h <= upper:
        offsets, row = np.arange(-2, 3), 2
    elif center - 2 * h < lower:
        offsets, row = np.arange(0, 5), 0
    else:
        offsets, row = np.arange(-4, 1), 4
    samples = np.array([func(center + k * h) for k in offsets])
    return float(derivative(samples, h)[row])


def intrinsic_connection(scene: SurfaceScene, u: float, v: float,
                         h: Optional[float] = None) -> Tuple[float, float, float]:
    """
    Connection form omega12(E1), omega12(E2) and Gaussian curvature at (u, v).

    The connection form is exact; K = -d omega12 / area is differenced with
    step h (the grid spacing by default), one-sided near the domain edges.
    """
    geo = point_geometry(scene, u, v)
    if h is None:
        h = min(scene.spacing)
    (u0, u1), (v0, v1) = scene.domain
    da_dv = _stencil_derivative(lambda t: point_geometry(scene, u, t).omega_coord[0], v, v0, v1, h)
    db_du = _stencil_derivative(lambda t: point_geometry(scene, t, v).omega_coord[1], u, u0, u1, h)
    K = -(db_du - da_dv) / geo.area
    return float(geo.omega[0]), float(geo.omega[1]), float(K)


def rotate_J(X):
    """
    Rotation by +pi/2 in the oriented tangent plane, J(a1, a2) = (-a2, a1).

    Accepts a TangentVec2 or an array with trailing axis 2.
    """
    if isinstance(X, TangentVec2):
        return TangentVec2(rotate_J(X.components), X.point)
    x = np.asarray(X, dtype=float)
    return np.stack([-x[..., 1], x[..., 0]], axis=-1)


@dataclass
class ExtrinsicData:
    """
    Extrinsic data of a scene on its grid.

    Grid arrays have leading shape (nu, nv). Frame vectors are stored in
    canonical-frame components (rows E1, E2, nu) and in chart components;
    A, T and omega refer to the tangent frame (E1, E2), whose coordinate
    expression is E_i = sum_c M[i, c] d/dc with P = M^-1.
    """

    scene: SurfaceScene
    u: np.ndarray
    v: np.ndarray
    points: np.ndarray
    frame: np.ndarray
    frame_chart: np.ndarray
    metric: np.ndarray
    M: np.ndarray
    P: np.ndarray
    A: np.ndarray
    T: np.ndarray
    f: np.ndarray
    omega: np.ndarray
    omega_coord: np.ndarray
    K: np.ndarray
    asymmetry: np.ndarray
    frame_rotation: float = 0.0
    fd_order: int = 4
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def H(self) -> np.ndarray:
        return 0.5 * (self.A[..., 0, 0] + self.A[..., 1, 1])

    @property
    def model(self) -> ModelSpace:
        return self.scene.model

    def unit_defect(self) -> np.ndarray:
        return np.abs(self.f ** 2 + np.sum(self.T ** 2, axis=-1) - 1.0)

    def to_abstract(self):
        """Abstract data (metric, A, T, f and connection) of the extracted surface."""
        from spinframe.compat import AbstractData

        return AbstractData(
            model=self.model,
            u=self.u,
            v=self.v,
            metric=self.metric,
            A=self.A,
            T=self.T,
            f=self.f,
            M=self.M,
            P=self.P,
            omega=self.omega,
            omega_coord=self.omega_coord,
            K=self.K,
            orientation=self.scene.orientation,
            fd_order=self.fd_order,
        )

    def summary(self) -> Dict[str, Any]:
        """Ranges of the scalar invariants."""
        T_norm = np.sqrt(np.sum(self.T ** 2, axis=-1))

        def span(a):
            return [float(np.min(a)), float(np.max(a))]

        return {
            "H": span(self.H),
            "f": span(self.f),
            "T_norm": span(T_norm),
            "K": span(self.K),
            "unit_defect": float(np.max(self.unit_defect())),
            "shape_asymmetry": float(np.max(self.asymmetry)),
        }


def _grid_point(scene: SurfaceScene, frame_rotation: float, degenerate_det: float,
                index: Tuple[int, int]) -> PointGeometry:
    i, j = index
    u = scene.domain[0][0] + i * scene.spacing[0]
    v = scene.domain[1][0] + j * scene.spacing[1]
    try:
        return point_geometry(scene, u, v, frame_rotation, degenerate_det)
    except ImmersionDegenerate as e:
        e.details["index"] = [i, j]
        raise


def curvature_from_connection(omega_coord: np.ndarray, area: np.ndarray, du: float, dv: float,
                              fd_order: int = 4) -> np.ndarray:
    """K = -(d_u omega12(d_v) - d_v omega12(d_u)) / area from a gridded connection form."""
    db_du = derivative(omega_coord[..., 1], du, 0, fd_order)
    da_dv = derivative(omega_coord[..., 0], dv, 1, fd_order)
    return -(db_du - da_dv) / area


def extract(scene: SurfaceScene, frame_rotation: float = 0.0,
            config: Optional[Dict[str, Any]] = None) -> ExtrinsicData:
    """
    Extract the extrinsic data of a scene on its grid.

    Args:
        scene: Surface scene
        frame_rotation: Constant rotation angle applied to (E1, E2)
        config: Spinframe configuration ("numerics" and "processing" sections)

    Returns:
        ExtrinsicData

    Raises:
        ChartDomainError: A grid sample leaves the chart
        ImmersionDegenerate: dF has rank < 2 somewhere on the grid
        EvaluationDomainError: An expression is undefined on the grid
    """
    config = config or {}
    numerics = config.get("numerics", {})
    fd_order = int(numerics.get("fd_order", 4))
    degenerate_det = float(numerics.get("degenerate_det", 1e-12))

    points = scene.validate()
    nu, nv = scene.grid
    logger.info(f"Extracting {nu}x{nv} grid of {scene.expressions()} in {scene.model.name}")

    worker = functools.partial(_grid_point, scene, frame_rotation, degenerate_det)
    samples = map_grid(worker, grid_items(nu, nv), config.get("processing"), "surface extraction")

    def gather(name):
        return np.array([getattr(s, name) for s in samples]).reshape((nu, nv) + np.shape(getattr(samples[0], name)))

    frame = gather("frame")
    area = gather("area")
    omega_coord = gather("omega_coord")
    du, dv = scene.spacing
    K = curvature_from_connection(omega_coord, area, du, dv, fd_order)

    data = ExtrinsicData(
        scene=scene,
        u=scene.u_values,
        v=scene.v_values,
        points=points,
        frame=frame,
        frame_chart=_chart_frame(scene.model, points, frame),
        metric=gather("metric"),
        M=gather("M"),
        P=gather("P"),
        A=gather("A"),
        T=gather("T"),
        f=gather("f"),
        omega=gather("omega"),
        omega_coord=omega_coord,
        K=K,
        asymmetry=gather("asymmetry"),
        frame_rotation=frame_rotation,
        fd_order=fd_order,
    )
    logger.debug(f"Extraction summary: {data.summary()}")
    return data
