"""
Charts, Frames and Connection

Closed-form geometry of the global chart (x, y, z) of a model space:

    lambda = 1 / (1 + kappa/4 (x^2 + y^2))
    theta1 = lambda (cos(sigma z) dx + sin(sigma z) dy)
    theta2 = lambda (-sin(sigma z) dx + cos(sigma z) dy)
    theta3 = dz + tau lambda (y dx - x dy)

The canonical frame (e1, e2, e3) is dual to this coframe, the metric is
theta1^2 + theta2^2 + theta3^2 and e3 is the unit vertical field. For
products tau = sigma = 0 and e3 is the parallel field d/dt.

Chart formulas are written once against the jets module so they evaluate on
floats, numpy arrays and Jet2 values alike.
"""

import logging
from typing import Any, List, Tuple

import numpy as np

from spinframe.ambient.model_space import (
    AmbientPoint,
    AmbientVec,
    Basis,
    ModelSpace,
    PointLike,
    point_coords,
)
from spinframe.exceptions import ChartDomainError, ModelSpaceError
from spinframe.exprparse import jets
from spinframe.exprparse.jets import Jet2

logger = logging.getLogger(__name__)


def conformal_factor(m: ModelSpace, x, y):
    """lambda(x, y) = 1 / (1 + kappa/4 (x^2 + y^2))."""
    return 1.0 / (1.0 + 0.25 * m.kappa * (x * x + y * y))


def in_chart(m: ModelSpace, x, y) -> np.ndarray:
    """Mask of chart points whose conformal factor lies in [lambda_min, 1/lambda_min]."""
    denom = 1.0 + 0.25 * m.kappa * (np.asarray(x, dtype=float) ** 2 + np.asarray(y, dtype=float) ** 2)
    with np.errstate(divide="ignore"):
        lam = np.where(denom > 0.0, 1.0 / np.where(denom > 0.0, denom, 1.0), np.inf)
    return (lam >= m.lambda_min) & (lam <= 1.0 / m.lambda_min)


def check_chart(m: ModelSpace, x, y, z=None, where: str = "") -> None:
    """
    Raise if any of the points leaves the chart domain.

    Raises:
        ChartDomainError: With the first offending point and its index
    """
    ok = in_chart(m, x, y)
    if np.all(ok):
        return
    index = tuple(int(i) for i in np.argwhere(~np.atleast_1d(ok))[0])
    xs, ys = np.broadcast_arrays(np.atleast_1d(np.asarray(x, float)), np.atleast_1d(np.asarray(y, float)))
    point = [float(xs[index]), float(ys[index])]
    if z is not None:
        point.append(float(np.broadcast_to(np.atleast_1d(np.asarray(z, float)), xs.shape)[index]))
    details = {"point": point, "index": list(index), "lambda_min": m.lambda_min}
    radius = m.chart_radius()
    if radius is not None:
        details["chart_radius"] = radius
    location = f" {where}" if where else ""
    raise ChartDomainError(f"Point {point}{location} lies outside the chart of {m.name}", details)


def _zero_like(value):
    if isinstance(value, Jet2):
        return 0.0
    return np.zeros_like(np.asarray(value, dtype=float))


def coframe_entries(m: ModelSpace, x, y, z) -> List[List[Any]]:
    """
    Coframe coefficients theta_i = sum_a entries[i][a] dx^a.

    Entries are of the input type (float, array or Jet2); structural zeros
    are returned as plain zeros.
    """
    lam = conformal_factor(m, x, y)
    angle = m.sigma * z
    c, s = jets.cos(angle), jets.sin(angle)
    zero = _zero_like(lam)
    tl = m.tau * lam
    return [
        [lam * c, lam * s, zero],
        [-(lam * s), lam * c, zero],
        [tl * y, -(tl * x), 1.0 + zero],
    ]


def frame_entries(m: ModelSpace, x, y, z) -> List[List[Any]]:
    """Chart components entries[c][j] of the canonical frame vector e_j."""
    lam = conformal_factor(m, x, y)
    angle = m.sigma * z
    c, s = jets.cos(angle), jets.sin(angle)
    zero = _zero_like(lam)
    inv = 1.0 / lam
    return [
        [inv * c, -(inv * s), zero],
        [inv * s, inv * c, zero],
        [m.tau * (x * s - y * c), m.tau * (x * c + y * s), 1.0 + zero],
    ]


def _stack(entries: List[List[Any]]) -> np.ndarray:
    rows = [np.broadcast_arrays(*[np.asarray(e, dtype=float) for e in row]) for row in entries]
    shape = np.broadcast_shapes(*[r[0].shape for r in rows])
    return np.stack([np.stack([np.broadcast_to(e, shape) for e in row], axis=-1) for row in rows],
                    axis=-2)


def coframe_matrix(m: ModelSpace, p: PointLike) -> np.ndarray:
    """Theta with theta_i = Theta[i, a] dx^a, shape (..., 3, 3)."""
    return _stack(coframe_entries(m, *point_coords(p)))


def frame_matrix(m: ModelSpace, p: PointLike) -> np.ndarray:
    """E with e_j = E[a, j] d/dx^a; the inverse of the coframe matrix."""
    return _stack(frame_entries(m, *point_coords(p)))


def metric_at(m: ModelSpace, p: PointLike, check: bool = True) -> np.ndarray:
    """
    Chart metric g_ab at p.

    Args:
        m: Model space
        p: Point, or array of points with trailing axis 3
        check: Validate the chart domain first

    Returns:
        Symmetric positive definite array of shape (..., 3, 3)

    Raises:
        ChartDomainError: If p lies outside the chart
    """
    x, y, z = point_coords(p)
    if check:
        check_chart(m, x, y, z)
    theta = coframe_matrix(m, p)
    return np.einsum("...ia,...ib->...ab", theta, theta)


def canonical_frame(m: ModelSpace, p: PointLike) -> Tuple[AmbientVec, AmbientVec, AmbientVec]:
    """
    The canonical orthonormal frame (e1, e2, e3) in chart components.

    Raises:
        ChartDomainError: If p lies outside the chart
    """
    point = p if isinstance(p, AmbientPoint) else AmbientPoint.from_sequence(list(p))
    check_chart(m, point.x, point.y, point.z)
    frame = frame_matrix(m, point)
    return tuple(AmbientVec(frame[:, j], Basis.CHART, point) for j in range(3))


def vertical_field(m: ModelSpace, p: PointLike) -> AmbientVec:
    """Unit vertical field xi = e3 = d/dz (d/dt for products)."""
    point = p if isinstance(p, AmbientPoint) else AmbientPoint.from_sequence(list(p))
    check_chart(m, point.x, point.y, point.z)
    return AmbientVec(np.array([0.0, 0.0, 1.0]), Basis.CHART, point)


def to_frame(m: ModelSpace, v: AmbientVec) -> AmbientVec:
    """Express a chart-basis vector in the canonical frame."""
    if v.basis is Basis.FRAME:
        return v
    if v.point is None:
        raise ValueError("Converting a vector between bases needs its base point")
    comps = np.einsum("...ia,...a->...i", coframe_matrix(m, v.point), v.components)
    return AmbientVec(comps, Basis.FRAME, v.point)


def to_chart(m: ModelSpace, v: AmbientVec) -> AmbientVec:
    """Express a frame-basis vector in the chart basis."""
    if v.basis is Basis.CHART:
        return v
    if v.point is None:
        raise ValueError("Converting a vector between bases needs its base point")
    comps = np.einsum("...aj,...j->...a", frame_matrix(m, v.point), v.components)
    return AmbientVec(comps, Basis.CHART, v.point)


def vector_product(X: AmbientVec, Y: AmbientVec, m: ModelSpace = None) -> AmbientVec:
    """
    Vector product of the model space, <X ^ Y, Z> = det(X, Y, Z) in (e1, e2, e3).

    Args:
        X: First vector
        Y: Second vector, same point and basis as X
        m: Model space; needed only for chart-basis vectors

    Raises:
        ValueError: On a basis or base point mismatch
    """
    if X.basis is not Y.basis:
        raise ValueError(f"Vector product of {X.basis.name} and {Y.basis.name} vectors")
    if X.point is not None and Y.point is not None and X.point != Y.point:
        raise ValueError(f"Vector product of vectors at {X.point} and {Y.point}")
    point = X.point or Y.point
    if X.basis is Basis.FRAME:
        return AmbientVec(np.cross(X.components, Y.components), Basis.FRAME, point)
    if m is None:
        raise ValueError("Vector product in the chart basis needs the model space")
    xf = to_frame(m, AmbientVec(X.components, Basis.CHART, point))
    yf = to_frame(m, AmbientVec(Y.components, Basis.CHART, point))
    return to_chart(m, AmbientVec(np.cross(xf.components, yf.components), Basis.FRAME, point))


def connection_table(m: ModelSpace, p: PointLike = None) -> np.ndarray:
    """
    Connection coefficients Gamma[i, j, k] = <nabla_{e_i} e_j, e_k> of the canonical frame.

    Constant for fibrations; for products only the base rotation terms
    depend on the point.

    Returns:
        Array of shape (..., 3, 3, 3), the batch shape following p
    """
    if not m.is_product:
        tau, sigma = m.tau, m.sigma
        table = np.zeros((3, 3, 3))
        table[0, 1, 2] = table[1, 2, 0] = tau
        table[1, 0, 2] = table[0, 2, 1] = -tau
        table[2, 1, 0] = tau - sigma
        table[2, 0, 1] = sigma - tau
        if p is None:
            return table
        x, _, _ = point_coords(p)
        return np.broadcast_to(table, np.shape(x) + (3, 3, 3)).copy()
    if p is None:
        raise ValueError("The product connection depends on the point")
    x, y, _ = point_coords(p)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    table = np.zeros(x.shape + (3, 3, 3))
    half = 0.5 * m.kappa
    table[..., 0, 0, 1] = half * y
    table[..., 0, 1, 0] = -half * y
    table[..., 1, 0, 1] = -half * x
    table[..., 1, 1, 0] = half * x
    return table


def christoffel_closed(m: ModelSpace, i: int, j: int, k: int) -> float:
    """
    Closed-form <nabla_{e_i} e_j, e_k> of a fibration, indices 1..3.

    Raises:
        ModelSpaceError: For product models, whose table is point dependent
        ValueError: On an index outside 1..3
    """
    if m.is_product:
        raise ModelSpaceError("Closed-form Christoffel symbols need tau != 0; "
                              "use christoffel_numeric for product models")
    for index in (i, j, k):
        if index not in (1, 2, 3):
            raise ValueError(f"Frame index must be 1, 2 or 3, got {index}")
    return float(connection_table(m)[i - 1, j - 1, k - 1])


def covariant_frame(table: np.ndarray, V: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Connection term sum_ij V_i W_j Gamma[i, j, :] for frame components V, W."""
    return np.einsum("...i,...j,...ijk->...k", V, W, table)


def frame_jacobian(m: ModelSpace, p: PointLike) -> np.ndarray:
    """
    Exact chart derivatives D[a, c, j] = d/dx^a of the chart component c of e_j.

    Uses two jet evaluations through the planes (x, y) and (x, z).
    """
    x0, y0, z0 = point_coords(p)
    u, v = Jet2.variable("u", 0.0), Jet2.variable("v", 0.0)
    in_xy = frame_entries(m, x0 + u, y0 + v, Jet2.constant(z0))
    in_xz = frame_entries(m, x0 + u, Jet2.constant(y0), z0 + v)
    jac = np.zeros((3, 3, 3))
    for c in range(3):
        for j in range(3):
            a, b = in_xy[c][j], in_xz[c][j]
            if isinstance(a, Jet2):
                jac[0, c, j] = a.du
                jac[1, c, j] = a.dv
            if isinstance(b, Jet2):
                jac[2, c, j] = b.dv
    return jac


def frame_bracket(m: ModelSpace, p: PointLike, i: int, j: int) -> np.ndarray:
    """Lie bracket [e_i, e_j] (indices 1..3) in frame components, from exact jets."""
    frame = frame_matrix(m, p)
    jac = frame_jacobian(m, p)
    ei, ej = frame[:, i - 1], frame[:, j - 1]
    chart = ei @ jac[:, :, j - 1] - ej @ jac[:, :, i - 1]
    return coframe_matrix(m, p) @ chart
