"""
Compatibility Residuals

Residuals of the equations that (g, A, T, f) must satisfy to come from an
isometric immersion into a model space: Gauss, Codazzi, the transport
equations of the vertical field and the structural identities.

All fields live on the (u, v) grid. Tangent quantities refer to an oriented
orthonormal frame E_i = sum_c M[i, c] d/dc with connection form
omega_i = omega12(E_i); covariant derivatives on the surface are

    nabla_X T = X(T) + omega(X) J T
    nabla_X A = X(A) + omega(X) (J A - A J)

with J the rotation by +pi/2. Directional derivatives X(.) use the finite
differences of utils.finite_differences.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from spinframe.ambient.curvature import curvature_closed, curvature_normal
from spinframe.ambient.model_space import ModelSpace
from spinframe.exceptions import SceneFormatError, StencilError
from spinframe.exprparse import Expr, eval_jet2, eval_values
from spinframe.utils.finite_differences import derivative, grid_gradient

logger = logging.getLogger(__name__)

J = np.array([[0.0, -1.0], [1.0, 0.0]])

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
NORMAL = np.array([0.0, 0.0, 1.0])

RESIDUAL_NAMES = ("gauss", "codazzi", "unit", "sym", "div", "condT", "condF")


@dataclass
class AbstractData:
    """
    Candidate immersion data on a grid.

    Attributes:
        model: Target model space
        u, v: Grid coordinates (1-D, uniform)
        metric: Induced metric g_ab in (u, v), shape (nu, nv, 2, 2)
        A: Shape operator in the frame (E1, E2), shape (nu, nv, 2, 2)
        T: Tangential part of the vertical field, shape (nu, nv, 2)
        f: Normal part of the vertical field, shape (nu, nv)
        M: Frame coefficients, E_i = sum_c M[i, c] d/dc
        P: Inverse of M, d/dc = sum_i P[c, i] E_i
        omega: Connection form on the frame, omega12(E_i)
        omega_coord: Connection form on d/du, d/dv
        K: Gaussian curvature
        orientation: +1 or -1
        fd_order: Finite-difference order used for derived fields
    """

    model: ModelSpace
    u: np.ndarray
    v: np.ndarray
    metric: np.ndarray
    A: np.ndarray
    T: np.ndarray
    f: np.ndarray
    M: np.ndarray
    P: np.ndarray
    omega: np.ndarray
    omega_coord: np.ndarray
    K: np.ndarray
    orientation: int = 1
    fd_order: int = 4

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.u), len(self.v)

    @property
    def du(self) -> float:
        return float(self.u[1] - self.u[0])

    @property
    def dv(self) -> float:
        return float(self.v[1] - self.v[0])

    @property
    def H(self) -> np.ndarray:
        return 0.5 * (self.A[..., 0, 0] + self.A[..., 1, 1])

    @property
    def area(self) -> np.ndarray:
        """Signed area density orientation * sqrt(det g)."""
        return self.orientation * np.sqrt(np.linalg.det(self.metric))

    def replace(self, **changes) -> "AbstractData":
        """Copy with some fields replaced; used for perturbation studies."""
        fields = dict(self.__dict__)
        fields.update(changes)
        return AbstractData(**fields)

    @classmethod
    def from_fields(cls, model: ModelSpace, u: np.ndarray, v: np.ndarray, metric: np.ndarray,
                    A: np.ndarray, T: np.ndarray, f: np.ndarray, orientation: int = 1,
                    metric_derivatives: Optional[np.ndarray] = None,
                    fd_order: int = 4) -> "AbstractData":
        """
        Build abstract data from the metric and the extrinsic fields.

        The frame is the Gram-Schmidt frame of (d/du, d/dv) in g, with E2
        flipped for orientation -1. Its connection form comes from the
        Christoffel symbols of g, its curvature from d omega12.

        Args:
            model: Target model space
            u, v: Uniform grid coordinates
            metric: g_ab, shape (nu, nv, 2, 2)
            A, T, f: Fields in the Gram-Schmidt frame
            orientation: +1 or -1
            metric_derivatives: d_c g_ab, shape (nu, nv, 2, 2, 2); differenced
                on the grid when omitted
            fd_order: Finite-difference order

        Raises:
            SceneFormatError: If shapes disagree or g is not positive definite
        """
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        shape = (len(u), len(v))
        metric = np.asarray(metric, dtype=float)
        A = np.asarray(A, dtype=float)
        T = np.asarray(T, dtype=float)
        f = np.asarray(f, dtype=float)
        expected = {"metric": shape + (2, 2), "A": shape + (2, 2), "T": shape + (2,), "f": shape}
        for name, array in (("metric", metric), ("A", A), ("T", T), ("f", f)):
            if array.shape != expected[name]:
                raise SceneFormatError(f"Field {name} has shape {array.shape}, "
                                       f"expected {expected[name]}")
        if min(shape) < 2:
            raise StencilError(f"Grid {shape} is too small for finite differences")

        g11, g12, g22 = metric[..., 0, 0], metric[..., 0, 1], metric[..., 1, 1]
        det = g11 * g22 - g12 * g12
        if not (np.all(g11 > 0.0) and np.all(det > 0.0)):
            bad = np.argwhere(~((g11 > 0.0) & (det > 0.0)))[0].tolist()
            raise SceneFormatError(f"Metric is not positive definite at grid index {bad}",
                                   {"index": bad})

        o = float(orientation)
        root11 = np.sqrt(g11)
        width = np.sqrt(det / g11)
        M = np.zeros(shape + (2, 2))
        M[..., 0, 0] = 1.0 / root11
        M[..., 1, 0] = -o * g12 / (g11 * width)
        M[..., 1, 1] = o / width
        P = np.linalg.inv(M)

        du, dv = u[1] - u[0], v[1] - v[0]
        if metric_derivatives is None:
            g_u, g_v = grid_gradient(metric, du, dv, fd_order)
            dg = np.stack([g_u, g_v], axis=-3)
        else:
            dg = np.asarray(metric_derivatives, dtype=float)
        # Christoffel symbols of the first kind: gamma[c, a, b] = <nabla_c d_a, d_b>.
        gamma = 0.5 * (dg + np.swapaxes(dg, -3, -2) - np.moveaxis(dg, -3, -1))
        omega_coord = np.einsum("...b,...cb->...c", M[..., 1, :], gamma[..., :, 0, :]) / root11[..., None]
        omega = np.einsum("...ic,...c->...i", M, omega_coord)

        a_v = derivative(omega_coord[..., 0], dv, 1, fd_order)
        b_u = derivative(omega_coord[..., 1], du, 0, fd_order)
        K = -(b_u - a_v) / (o * np.sqrt(det))

        return cls(model=model, u=u, v=v, metric=metric, A=0.5 * (A + np.swapaxes(A, -1, -2)),
                   T=T, f=f, M=M, P=P, omega=omega, omega_coord=omega_coord, K=K,
                   orientation=int(orientation), fd_order=fd_order)

    @classmethod
    def from_expressions(cls, model: ModelSpace, u: np.ndarray, v: np.ndarray,
                         fields: Dict[str, Expr], orientation: int = 1,
                         fd_order: int = 4) -> "AbstractData":
        """
        Build abstract data from expressions in (u, v).

        Args:
            fields: Expressions for g11, g12, g22, a11, a12, a22, t1, t2, f

        The metric derivatives are taken exactly from 2-jets.
        """
        missing = [k for k in ("g11", "g12", "g22", "a11", "a12", "a22", "t1", "t2", "f")
                   if k not in fields]
        if missing:
            raise SceneFormatError(f"Abstract data lacks fields: {', '.join(missing)}")
        uu, vv = np.meshgrid(u, v, indexing="ij")

        def values(name):
            return np.broadcast_to(eval_values(fields[name], uu, vv), uu.shape).astype(float)

        metric = np.zeros(uu.shape + (2, 2))
        dg = np.zeros(uu.shape + (2, 2, 2))
        for (a, b), name in (((0, 0), "g11"), ((0, 1), "g12"), ((1, 1), "g22")):
            for i, ui in enumerate(u):
                for j, vj in enumerate(v):
                    jet = eval_jet2(fields[name], float(ui), float(vj))
                    metric[i, j, a, b] = metric[i, j, b, a] = jet.value
                    dg[i, j, 0, a, b] = dg[i, j, 0, b, a] = jet.du
                    dg[i, j, 1, a, b] = dg[i, j, 1, b, a] = jet.dv

        A = np.zeros(uu.shape + (2, 2))
        A[..., 0, 0] = values("a11")
        A[..., 0, 1] = A[..., 1, 0] = values("a12")
        A[..., 1, 1] = values("a22")
        T = np.stack([values("t1"), values("t2")], axis=-1)
        return cls.from_fields(model, u, v, metric, A, T, values("f"), orientation, dg, fd_order)


def frame_derivative(data: AbstractData, values: np.ndarray) -> np.ndarray:
    """
    Directional derivatives E1(F), E2(F) of a grid field.

    Args:
        data: Abstract data providing the frame
        values: Field with leading grid axes (nu, nv)

    Returns:
        Array of shape (nu, nv, 2) + values.shape[2:]
    """
    d_u, d_v = grid_gradient(values, data.du, data.dv, data.fd_order)
    extra = (None,) * (values.ndim - 2)
    rows = [data.M[(Ellipsis, i, 0) + extra] * d_u + data.M[(Ellipsis, i, 1) + extra] * d_v
            for i in (0, 1)]
    return np.stack(rows, axis=2)


def covariant_T(data: AbstractData) -> np.ndarray:
    """nabla_{E_i} T, shape (nu, nv, 2, 2) with axis 2 the direction i."""
    JT = data.T @ J.T
    return frame_derivative(data, data.T) + data.omega[..., None] * JT[..., None, :]


def covariant_A(data: AbstractData) -> np.ndarray:
    """nabla_{E_i} A, shape (nu, nv, 2, 2, 2) with axis 2 the direction i."""
    bracket = J @ data.A - data.A @ J
    return frame_derivative(data, data.A) + data.omega[..., None, None] * bracket[..., None, :, :]


def _vertical(data: AbstractData) -> np.ndarray:
    """The vertical field in the adapted basis (E1, E2, nu)."""
    return np.concatenate([data.T, data.f[..., None]], axis=-1)


def ambient_sectional(data: AbstractData) -> np.ndarray:
    """R(E1, E2, E1, E2) of the ambient space along the surface."""
    return curvature_closed(data.model, E1, E2, E1, E2, _vertical(data))


def _at(values: np.ndarray, index: Optional[Sequence[int]]):
    if index is None:
        return values
    i, j = index
    return float(values[i, j])


def gauss_residual(data: AbstractData, index: Optional[Sequence[int]] = None):
    """
    |K - det A - R(E1, E2, E1, E2)|.

    Returns the residual grid, or its value at a grid index when given.
    """
    residual = np.abs(data.K - np.linalg.det(data.A) - ambient_sectional(data))
    return _at(residual, index)


def codazzi_vector(data: AbstractData) -> np.ndarray:
    """d^nabla A(E1, E2) + (R(E1, E2) nu)^T in the frame."""
    nabla = covariant_A(data)
    dA = nabla[..., 0, :, 1] - nabla[..., 1, :, 0]
    ambient = curvature_normal(data.model, E1, E2, NORMAL, _vertical(data))
    return dA + ambient[..., :2]


def codazzi_residual(data: AbstractData, index: Optional[Sequence[int]] = None):
    residual = np.linalg.norm(codazzi_vector(data), axis=-1)
    return _at(residual, index)


def structural_residuals(data: AbstractData,
                         index: Optional[Sequence[int]] = None) -> Dict[str, Any]:
    """
    Residuals {unit, sym, div} of the identities satisfied by the vertical field.

    unit = |f^2 + |T|^2 - 1|
    sym  = |<nabla_E1 T, E2> - <nabla_E2 T, E1> - 2 tau f <E1, J E2>|
    div  = |2 H f - div T|
    """
    tau = data.model.tau
    nabla = covariant_T(data)
    unit = np.abs(data.f ** 2 + np.sum(data.T ** 2, axis=-1) - 1.0)
    # <E1, J E2> = -1
    sym = np.abs(nabla[..., 0, 1] - nabla[..., 1, 0] + 2.0 * tau * data.f)
    div = np.abs(2.0 * data.H * data.f - (nabla[..., 0, 0] + nabla[..., 1, 1]))
    return {name: _at(value, index) for name, value in (("unit", unit), ("sym", sym), ("div", div))}


def cond_residuals(data: AbstractData, index: Optional[Sequence[int]] = None) -> Dict[str, Any]:
    """
    Residuals {condT, condF} of the transport equations of T and f.

    condT = |nabla_X T - f (A X - tau J X)| and condF = |df(X) + <A X - tau J X, T>|,
    both as Frobenius norms over X in {E1, E2}.
    """
    tau = data.model.tau
    # Column i of (A - tau J) is A E_i - tau J E_i.
    operator = data.A - tau * J
    target = data.f[..., None, None] * np.swapaxes(operator, -1, -2)
    cond_T = np.sqrt(np.sum((covariant_T(data) - target) ** 2, axis=(-2, -1)))
    df = frame_derivative(data, data.f)
    projected = np.einsum("...ki,...k->...i", operator, data.T)
    cond_F = np.sqrt(np.sum((df + projected) ** 2, axis=-1))
    return {"condT": _at(cond_T, index), "condF": _at(cond_F, index)}


def residual_fields(data: AbstractData) -> Dict[str, np.ndarray]:
    """All compatibility residual grids, keyed by RESIDUAL_NAMES."""
    fields = {"gauss": gauss_residual(data), "codazzi": codazzi_residual(data)}
    fields.update(structural_residuals(data))
    fields.update(cond_residuals(data))
    return {name: fields[name] for name in RESIDUAL_NAMES}


def worst_residual(data: AbstractData) -> Dict[str, Any]:
    """Largest compatibility residual with its name and grid location."""
    worst = {"name": None, "value": 0.0, "index": None}
    for name, values in residual_fields(data).items():
        index = np.unravel_index(int(np.argmax(values)), values.shape)
        value = float(values[index])
        if not value <= worst["value"]:
            worst = {"name": name, "value": value, "index": [int(k) for k in index],
                     "u": float(data.u[index[0]]), "v": float(data.v[index[1]])}
    logger.debug(f"Worst compatibility residual: {worst}")
    return worst
