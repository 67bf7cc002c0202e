"""
Spinor Fields on Surfaces

Spinor fields on the parameter grid and the identities that characterise
restrictions of the special ambient spinors: generalized Killing equations,
Dirac equations, the energy-momentum tensor Q and the shape-operator
recovery A = 2Q + B, norm laws, the Ricci identity and the splitting of a
field into half spinors.

The spin connection in an orthonormal frame with connection form omega is
nabla_X phi = X(phi) + omega(X)/2 . e1 . e2 . phi. The generalized Killing
equations have the form nabla_X phi = N(X) phi - (A X) . phi / 2, where the
non-shape part N depends on the geometry:

    product     N(X) = eta X.T + eta f X + eta <X,T>
    fibration   N(X) = -tau/2 X.w + alpha/2 <X,T> T.w - alpha/2 f <X,T> w

with w = e1 . e2 the real volume element.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from spinframe.ambient.model_space import ModelSpace
from spinframe.clifford import (
    GAMMA1,
    GAMMA2,
    IDENTITY,
    OMEGA,
    Spinor,
    TangentVec2,
    apply,
    bar,
    clifford_mul,
    gamma_matrix,
    norm2,
    omega_mul,
    re_herm,
    split,
)
from spinframe.compat import J, AbstractData, frame_derivative
from spinframe.exceptions import GridMismatch, HalfSpinorVanishes, ModelSpaceError, SpinorVanishes

logger = logging.getLogger(__name__)

GAMMAS = (GAMMA1, GAMMA2)
BASIS = np.eye(2)


@dataclass(frozen=True)
class SpinGeometry:
    """
    Which generalized Killing equation a spinor field is tested against.

    Attributes:
        tag: "product-eta-half", "product-eta-ihalf" or "fibration"
        eta: Killing constant of the product equations
        tau: Bundle curvature (fibration)
        alpha: 2 tau - kappa / (2 tau) (fibration)
    """

    tag: str
    eta: complex = 0.0
    tau: float = 0.0
    alpha: float = 0.0

    @property
    def is_product(self) -> bool:
        return self.tag != "fibration"

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {"tag": self.tag}
        if self.is_product:
            result["eta"] = [float(np.real(self.eta)), float(np.imag(self.eta))]
        else:
            result.update(tau=self.tau, alpha=self.alpha)
        return result


class SpinGeometryFactory:
    """
    Factory for spin geometries matching a model space.
    """

    TAGS = ("product-eta-half", "product-eta-ihalf", "fibration")

    @staticmethod
    def create_geometry(tag: str, model: ModelSpace, eta: Optional[complex] = None) -> SpinGeometry:
        """
        Create the spin geometry named by tag for the given model.

        Args:
            tag: Geometry tag
            model: Model space the field lives in
            eta: Override of the Killing constant of the product equations

        Returns:
            SpinGeometry

        Raises:
            ModelSpaceError: If the tag is unknown or does not match the model
        """
        if tag == "product-eta-half":
            if not (model.is_product and model.kappa > 0.0):
                raise ModelSpaceError(f"Geometry {tag} needs a product with kappa > 0, "
                                      f"got {model.name}")
            return SpinGeometry(tag, eta=0.5 if eta is None else eta)
        elif tag == "product-eta-ihalf":
            if not (model.is_product and model.kappa < 0.0):
                raise ModelSpaceError(f"Geometry {tag} needs a product with kappa < 0, "
                                      f"got {model.name}")
            return SpinGeometry(tag, eta=0.5j if eta is None else eta)
        elif tag == "fibration":
            if model.is_product:
                raise ModelSpaceError(f"Geometry {tag} needs tau != 0, got {model.name}")
            return SpinGeometry(tag, tau=model.tau, alpha=model.alpha)
        raise ModelSpaceError(f"Unknown spinor geometry: {tag}. "
                              f"Known geometries: {', '.join(SpinGeometryFactory.TAGS)}")

    @staticmethod
    def default_for(model: ModelSpace) -> SpinGeometry:
        """The geometry whose equation the model's special spinors satisfy."""
        if not model.is_product:
            return SpinGeometryFactory.create_geometry("fibration", model)
        tag = "product-eta-half" if model.kappa > 0.0 else "product-eta-ihalf"
        return SpinGeometryFactory.create_geometry(tag, model)


@dataclass
class SpinorField:
    """
    Grid of spinor values aligned with the grid of some extrinsic data.

    Attributes:
        values: Complex array, shape (nu, nv, 2)
        geometry: Spin geometry the field is tested against
    """

    values: np.ndarray
    geometry: SpinGeometry

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.ndim != 3 or self.values.shape[-1] != 2:
            raise ValueError(f"Spinor field needs shape (nu, nv, 2), got {self.values.shape}")

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape[0], self.values.shape[1]

    def norm2(self) -> np.ndarray:
        return norm2(self.values)

    def at(self, i: int, j: int) -> Spinor:
        return Spinor(self.values[i, j], (i, j))

    def scaled(self, factor) -> "SpinorField":
        return SpinorField(self.values * np.asarray(factor)[..., None], self.geometry)


@dataclass
class EMTensor:
    """
    Energy-momentum tensor Q in the frame, defined where the spinor does not vanish.

    Attributes:
        values: Symmetric matrices, shape (nu, nv, 2, 2); NaN where undefined
        valid: Mask of grid points where |phi| exceeds the vanishing threshold
    """

    values: np.ndarray
    valid: np.ndarray

    def at(self, i: int, j: int) -> np.ndarray:
        if not self.valid[i, j]:
            raise SpinorVanishes(f"Spinor vanishes at grid index {[i, j]}", {"index": [i, j]})
        return self.values[i, j]


@dataclass
class SplittingSuite:
    """
    Tensors of the splitting phi = phi+ + phi- and the diagnostics of W.

    Matrices have shape (nu, nv, 2, 2) and are NaN outside valid.
    """

    Q_plus: np.ndarray
    Q_minus: np.ndarray
    B_plus: np.ndarray
    B_minus: np.ndarray
    A_plus: np.ndarray
    A_minus: np.ndarray
    W: np.ndarray
    trW: np.ndarray
    symW: np.ndarray
    rankW: np.ndarray
    valid: np.ndarray
    excluded: int = 0

    def diagnostics(self) -> Dict[str, float]:
        """Maxima over the valid points of |W|, |tr W|, |W12 - W21| and the rank proxy."""
        mask = self.valid
        return {
            "W": float(np.max(np.abs(self.W[mask]))),
            "trW": float(np.max(self.trW[mask])),
            "symW": float(np.max(self.symW[mask])),
            "rankW_proxy": float(np.max(self.rankW[mask])),
            "excluded_points": int(self.excluded),
        }


def _check_aligned(field: SpinorField, data: AbstractData) -> None:
    if field.shape != data.shape:
        raise GridMismatch(f"Spinor field grid {list(field.shape)} does not match data grid "
                           f"{list(data.shape)}")


def _at(values: np.ndarray, index: Optional[Sequence[int]]):
    if index is None:
        return values
    i, j = index
    return float(values[i, j])


def _dot(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return np.sum(X * Y, axis=-1)


# Pointwise operators


def nonshape_operator(geometry: SpinGeometry, T: np.ndarray, f: np.ndarray,
                      X: np.ndarray) -> np.ndarray:
    """
    Matrix of the non-shape part N(X) of the Killing equation.

    Args:
        geometry: Spin geometry
        T, f: Vertical splitting, shapes (..., 2) and (...)
        X: Tangent vector(s), shape (..., 2)

    Returns:
        Complex matrices, shape (..., 2, 2)
    """
    T = np.asarray(T, dtype=float)
    f = np.asarray(f, dtype=float)[..., None, None]
    X = np.broadcast_to(np.asarray(X, dtype=float), np.broadcast_shapes(np.shape(X), T.shape))
    gX, gT = gamma_matrix(X), gamma_matrix(T)
    XT = _dot(X, T)[..., None, None]
    if geometry.is_product:
        eta = geometry.eta
        return eta * gX @ gT + eta * f * gX + eta * XT * IDENTITY
    tau, alpha = geometry.tau, geometry.alpha
    return -0.5 * tau * gX @ OMEGA + 0.5 * alpha * XT * gT @ OMEGA - 0.5 * alpha * f * XT * OMEGA


def killing_operator(geometry: SpinGeometry, A: np.ndarray, T: np.ndarray, f: np.ndarray,
                     X: np.ndarray) -> np.ndarray:
    """Matrix of the right-hand side N(X) - (A X)/2 of the generalized Killing equation."""
    AX = np.einsum("...ij,...j->...i", np.asarray(A, dtype=float), np.asarray(X, dtype=float))
    return nonshape_operator(geometry, T, f, X) - 0.5 * gamma_matrix(AX)


def killing_rhs_omega_form(geometry: SpinGeometry, A, T, f, X, phi) -> np.ndarray:
    """Killing right-hand side written with the real volume element."""
    return apply(killing_operator(geometry, A, T, f, X), phi)


def killing_rhs_bar_form(geometry: SpinGeometry, A, T, f, X, phi) -> np.ndarray:
    """
    Fibration Killing right-hand side written with the reflected spinor:

        i tau/2 X.bar(phi) - i alpha/2 <X,T> T.bar(phi)
            + i alpha/2 f <X,T> bar(phi) - (A X).phi / 2
    """
    if geometry.is_product:
        raise ModelSpaceError("The reflected-spinor form exists for the fibration geometry only")
    phi = np.asarray(phi, dtype=complex)
    X = np.asarray(X, dtype=float)
    T = np.asarray(T, dtype=float)
    f = np.asarray(f, dtype=float)
    reflected = bar(phi)
    XT = _dot(X, T)[..., None]
    AX = np.einsum("...ij,...j->...i", np.asarray(A, dtype=float), X)
    return (0.5j * geometry.tau * clifford_mul(X, reflected)
            - 0.5j * geometry.alpha * XT * clifford_mul(T, reflected)
            + 0.5j * geometry.alpha * f[..., None] * XT * reflected
            - 0.5 * clifford_mul(AX, phi))


def dirac_rhs(geometry: SpinGeometry, H, T, f, phi) -> np.ndarray:
    """
    Right-hand side of the Dirac equation implied by the Killing equation.

    product:   (H - 2 eta f) phi - eta T.phi
    fibration: H phi + (tau - alpha/2 |T|^2) w.phi - alpha/2 f T.w.phi
    """
    phi = np.asarray(phi, dtype=complex)
    H = np.asarray(H, dtype=float)[..., None]
    f = np.asarray(f, dtype=float)[..., None]
    T = np.asarray(T, dtype=float)
    if geometry.is_product:
        eta = geometry.eta
        return (H - 2.0 * eta * f) * phi - eta * clifford_mul(T, phi)
    tau, alpha = geometry.tau, geometry.alpha
    w_phi = omega_mul(phi)
    return (H * phi + (tau - 0.5 * alpha * _dot(T, T)[..., None]) * w_phi
            - 0.5 * alpha * f * clifford_mul(T, w_phi))


def killing_dirac_contraction(geometry: SpinGeometry, A, T, f, phi) -> np.ndarray:
    """Sum_i E_i . (Killing right-hand side at E_i), the Dirac value of a Killing spinor."""
    phi = np.asarray(phi, dtype=complex)
    total = np.zeros(np.broadcast_shapes(phi.shape, np.shape(T)), dtype=complex)
    for i in (0, 1):
        X = np.broadcast_to(BASIS[i], np.shape(T))
        total = total + apply(GAMMAS[i], killing_rhs_omega_form(geometry, A, T, f, X, phi))
    return total


# Field-level derivatives


def covariant_derivatives(data: AbstractData, values: np.ndarray) -> np.ndarray:
    """
    nabla_{E_i} of a grid spinor field.

    Returns:
        Complex array, shape (nu, nv, 2, 2) with axis 2 the direction i
    """
    directional = frame_derivative(data, np.asarray(values, dtype=complex))
    return directional + 0.5 * data.omega[..., None] * omega_mul(values)[..., None, :]


def spin_cov_deriv(field: SpinorField, data: AbstractData, X,
                   index: Optional[Sequence[int]] = None):
    """
    Spin covariant derivative nabla_X phi.

    Args:
        field: Spinor field
        data: Abstract data on the same grid
        X: TangentVec2 or array with trailing axis 2, either one vector or a grid
        index: Grid index; defaults to X.point when X carries one

    Returns:
        Spinor at the grid index, or a complex grid of shape (nu, nv, 2)
    """
    _check_aligned(field, data)
    if index is None and isinstance(X, TangentVec2):
        index = X.point
    x = X.components if isinstance(X, TangentVec2) else np.asarray(X, dtype=float)
    nabla = covariant_derivatives(data, field.values)
    result = np.einsum("...i,...ik->...k", x, nabla)
    if index is None:
        return result
    i, j = index
    point_value = result[i, j] if result.ndim == 3 else result
    return Spinor(point_value, (i, j))


def _killing_rhs_grid(field: SpinorField, data: AbstractData, values: np.ndarray = None) -> np.ndarray:
    values = field.values if values is None else values
    rows = [killing_rhs_omega_form(field.geometry, data.A, data.T, data.f,
                                   np.broadcast_to(BASIS[i], data.T.shape), values)
            for i in (0, 1)]
    return np.stack(rows, axis=2)


def killing_residual(field: SpinorField, data: AbstractData,
                     index: Optional[Sequence[int]] = None):
    """max over X in {E1, E2} of |nabla_X phi - (Killing right-hand side)(X)|."""
    _check_aligned(field, data)
    defect = covariant_derivatives(data, field.values) - _killing_rhs_grid(field, data)
    residual = np.max(np.sqrt(norm2(defect)), axis=-1)
    return _at(residual, index)


def killing_residual_product(field: SpinorField, data: AbstractData,
                             index: Optional[Sequence[int]] = None):
    if not field.geometry.is_product:
        raise ModelSpaceError(f"Field geometry {field.geometry.tag} is not a product geometry")
    return killing_residual(field, data, index)


def killing_residual_fibration(field: SpinorField, data: AbstractData,
                               index: Optional[Sequence[int]] = None):
    if field.geometry.is_product:
        raise ModelSpaceError(f"Field geometry {field.geometry.tag} is not the fibration geometry")
    return killing_residual(field, data, index)


def dirac(field: SpinorField, data: AbstractData, index: Optional[Sequence[int]] = None):
    """D phi = E1 . nabla_E1 phi + E2 . nabla_E2 phi."""
    _check_aligned(field, data)
    nabla = covariant_derivatives(data, field.values)
    value = apply(GAMMA1, nabla[..., 0, :]) + apply(GAMMA2, nabla[..., 1, :])
    if index is None:
        return value
    i, j = index
    return Spinor(value[i, j], (i, j))


def dirac_residual(field: SpinorField, data: AbstractData,
                   index: Optional[Sequence[int]] = None):
    """|D phi - (Dirac right-hand side)|."""
    rhs = dirac_rhs(field.geometry, data.H, data.T, data.f, field.values)
    residual = np.sqrt(norm2(dirac(field, data) - rhs))
    return _at(residual, index)


# Energy-momentum tensor and shape-operator recovery


def _valid_mask(values: np.ndarray, epsilon_zero: float) -> np.ndarray:
    n = np.sqrt(norm2(values))
    scale = float(np.max(n)) if n.size else 0.0
    return n > epsilon_zero * max(scale, 1e-300)


def _divide_valid(tensor: np.ndarray, n2: np.ndarray, valid: np.ndarray) -> np.ndarray:
    safe = np.where(valid, n2, 1.0)[..., None, None]
    return np.where(valid[..., None, None], tensor / safe, np.nan)


def energy_momentum(field: SpinorField, data: AbstractData,
                    epsilon_zero: float = 1e-10) -> EMTensor:
    """
    Q(X, Y) = Re<X . nabla_Y phi + Y . nabla_X phi, phi> / (2 |phi|^2).

    Points where |phi| <= epsilon_zero * max |phi| are left undefined.

    Raises:
        SpinorVanishes: If the field vanishes everywhere
    """
    _check_aligned(field, data)
    valid = _valid_mask(field.values, epsilon_zero)
    if not np.any(valid):
        raise SpinorVanishes("Spinor field vanishes on the whole grid")
    nabla = covariant_derivatives(data, field.values)
    phi = field.values
    Q = np.zeros(field.shape + (2, 2))
    for i in (0, 1):
        for j in (0, 1):
            Q[..., i, j] = 0.5 * (re_herm(apply(GAMMAS[i], nabla[..., j, :]), phi)
                                  + re_herm(apply(GAMMAS[j], nabla[..., i, :]), phi))
    excluded = int(np.sum(~valid))
    if excluded:
        logger.warning(f"Energy-momentum tensor undefined at {excluded} grid points where the "
                       f"spinor vanishes")
    return EMTensor(_divide_valid(Q, field.norm2(), valid), valid)


def general_b_tensor(geometry: SpinGeometry, T, f, phi, epsilon_zero: float = 0.0) -> np.ndarray:
    """
    B(X, Y) = -Re<X . N(Y) phi + Y . N(X) phi, phi> / |phi|^2, N the non-shape operator.

    Raises:
        SpinorVanishes: If |phi| <= epsilon_zero at every point
    """
    phi = np.asarray(phi, dtype=complex)
    T = np.asarray(T, dtype=float)
    n2 = norm2(phi)
    valid = np.sqrt(n2) > epsilon_zero
    if not np.any(valid):
        raise SpinorVanishes("B-tensor is undefined where the spinor vanishes")
    N_phi = [apply(nonshape_operator(geometry, T, f, np.broadcast_to(BASIS[i], T.shape)), phi)
             for i in (0, 1)]
    B = np.zeros(np.shape(n2) + (2, 2))
    for i in (0, 1):
        for j in (0, 1):
            B[..., i, j] = -(re_herm(apply(GAMMAS[i], N_phi[j]), phi)
                             + re_herm(apply(GAMMAS[j], N_phi[i]), phi))
    return _divide_valid(B, n2, np.asarray(valid))


def b_tensor(geometry: SpinGeometry, T, f, phi=None) -> np.ndarray:
    """
    B-tensor linking Q to the shape operator, A = 2Q + B.

    Closed forms: 2 eta f Id for real eta; for the fibration
    alpha/2 [[2 T1 T2, T2^2 - T1^2], [T2^2 - T1^2, -2 T1 T2]].
    A non-real eta needs the spinor phi.
    """
    T = np.asarray(T, dtype=float)
    f = np.asarray(f, dtype=float)
    if geometry.is_product:
        if np.imag(geometry.eta) == 0.0:
            return 2.0 * float(np.real(geometry.eta)) * f[..., None, None] * np.eye(2)
        if phi is None:
            raise ValueError(f"B-tensor of geometry {geometry.tag} depends on the spinor")
        return general_b_tensor(geometry, T, f, phi)
    t1, t2 = T[..., 0], T[..., 1]
    off = 0.5 * geometry.alpha * (t2 ** 2 - t1 ** 2)
    diag = geometry.alpha * t1 * t2
    return np.stack([np.stack([diag, off], axis=-1), np.stack([off, -diag], axis=-1)], axis=-2)


def recover_A(field: SpinorField, data: AbstractData, epsilon_zero: float = 1e-10) -> np.ndarray:
    """Shape operator recovered from the spinor, 2Q + B; NaN where the spinor vanishes."""
    Q = energy_momentum(field, data, epsilon_zero)
    B = b_tensor(field.geometry, data.T, data.f, field.values)
    return 2.0 * Q.values + B


def recover_residual(field: SpinorField, data: AbstractData, epsilon_zero: float = 1e-10,
                     index: Optional[Sequence[int]] = None):
    """Largest entry of |2Q + B - A|, zero where the spinor vanishes."""
    error = np.max(np.abs(recover_A(field, data, epsilon_zero) - data.A), axis=(-2, -1))
    return _at(np.nan_to_num(error, nan=0.0), index)


# Norm laws, integrability, splitting


def norm_law_residual(field: SpinorField, data: AbstractData,
                      index: Optional[Sequence[int]] = None):
    """
    max over X in {E1, E2} of |X|phi|^2 - 2 Re<N(X) phi, phi>|.

    The right-hand side vanishes for real eta and for the fibration (constant
    norm); for eta = i/2 it is Re<i X.T.phi + i f X.phi, phi>.
    """
    _check_aligned(field, data)
    phi = field.values
    derivative_n2 = frame_derivative(data, field.norm2())
    expected = np.stack([
        2.0 * re_herm(apply(nonshape_operator(field.geometry, data.T, data.f,
                                              np.broadcast_to(BASIS[i], data.T.shape)), phi), phi)
        for i in (0, 1)], axis=-1)
    residual = np.max(np.abs(derivative_n2 - expected), axis=-1)
    return _at(residual, index)


def ricci_residual(field: SpinorField, data: AbstractData,
                   index: Optional[Sequence[int]] = None):
    """
    |nabla_1 nabla_2 phi - nabla_2 nabla_1 phi - nabla_[E1,E2] phi + K/2 w.phi|.

    The bracket [E1, E2] is differenced from the frame coefficients and
    expanded in the frame; all four nabla terms use the frame connection form.
    """
    _check_aligned(field, data)
    phi = field.values
    nabla = covariant_derivatives(data, phi)
    second_12 = covariant_derivatives(data, nabla[..., 1, :])[..., 0, :]
    second_21 = covariant_derivatives(data, nabla[..., 0, :])[..., 1, :]

    dM = frame_derivative(data, data.M)
    bracket = np.einsum("...c,...ci->...i", dM[..., 0, 1, :] - dM[..., 1, 0, :], data.P)
    nabla_bracket = np.einsum("...i,...ik->...k", bracket, nabla)
    w_phi = omega_mul(phi)

    defect = second_12 - second_21 - nabla_bracket + 0.5 * data.K[..., None] * w_phi
    return _at(np.sqrt(norm2(defect)), index)


def _split_tensors(D: np.ndarray, phi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Re<D_i^+, E_j . phi^-> and Re<D_i^-, E_j . phi^+> for a direction-indexed spinor D."""
    plus, minus = split(phi)
    D_plus, D_minus = split(D)
    shape = phi.shape[:-1] + (2, 2)
    T_plus, T_minus = np.zeros(shape), np.zeros(shape)
    for i in (0, 1):
        for j in (0, 1):
            T_plus[..., i, j] = re_herm(D_plus[..., i, :], apply(GAMMAS[j], minus))
            T_minus[..., i, j] = re_herm(D_minus[..., i, :], apply(GAMMAS[j], plus))
    return T_plus, T_minus


def _nonshape_grid(geometry: SpinGeometry, data: AbstractData, phi: np.ndarray) -> np.ndarray:
    return np.stack([apply(nonshape_operator(geometry, data.T, data.f,
                                             np.broadcast_to(BASIS[i], data.T.shape)), phi)
                     for i in (0, 1)], axis=-2)


def splitting_suite(field: SpinorField, data: AbstractData, epsilon_zero: float = 1e-10,
                    min_fraction: float = 0.05) -> SplittingSuite:
    """
    Half-spinor tensors Q+-, B+-, A+- = Q+- + B+- and W = A+/|phi-|^2 - A-/|phi+|^2.

    Q+-(X, Y) = Re<(nabla_X phi)+-, Y.phi-+>, B+-(X, Y) = -Re<(N(X) phi)+-, Y.phi-+>.
    Points where either half is below min_fraction * |phi| are excluded.

    Raises:
        HalfSpinorVanishes: If no grid point keeps both halves, naming the half
            that is small at most points
    """
    _check_aligned(field, data)
    phi = field.values
    plus, minus = split(phi)
    n = np.sqrt(norm2(phi))
    n_plus, n_minus = np.sqrt(norm2(plus)), np.sqrt(norm2(minus))
    small_plus = n_plus < min_fraction * n
    small_minus = n_minus < min_fraction * n
    valid = _valid_mask(phi, epsilon_zero) & ~small_plus & ~small_minus
    if not np.any(valid):
        half = "+" if np.sum(small_plus) >= np.sum(small_minus) else "-"
        raise HalfSpinorVanishes(half, {"grid": list(field.shape)})

    Q_plus, Q_minus = _split_tensors(covariant_derivatives(data, phi), phi)
    N_plus, N_minus = _split_tensors(_nonshape_grid(field.geometry, data, phi), phi)
    B_plus, B_minus = -N_plus, -N_minus
    A_plus, A_minus = Q_plus + B_plus, Q_minus + B_minus
    W = (_divide_valid(A_plus, n_minus ** 2, valid) - _divide_valid(A_minus, n_plus ** 2, valid))

    trW = np.abs(W[..., 0, 0] + W[..., 1, 1])
    symW = np.abs(W[..., 0, 1] - W[..., 1, 0])
    rank = np.zeros(field.shape + (2,))
    W_rows = np.nan_to_num(W)
    for i in (0, 1):
        rank[..., i] = re_herm(clifford_mul(W_rows[..., i, :], minus), plus)
    rankW = np.where(valid, np.max(np.abs(rank), axis=-1), np.nan)

    def masked(t):
        return np.where(valid[..., None, None], t, np.nan)

    excluded = int(np.sum(~valid))
    if excluded:
        logger.debug(f"Splitting suite excludes {excluded} points with a small half spinor")
    return SplittingSuite(
        Q_plus=masked(Q_plus), Q_minus=masked(Q_minus),
        B_plus=masked(B_plus), B_minus=masked(B_minus),
        A_plus=masked(A_plus), A_minus=masked(A_minus),
        W=W, trW=trW, symW=symW, rankW=rankW, valid=valid, excluded=excluded,
    )


def trace_identity_expected(geometry: SpinGeometry, H, T, f, phi) -> Tuple[np.ndarray, np.ndarray]:
    """
    Closed forms of tr(Q+) and tr(Q-) for a Killing spinor.

    product:   -H |phi-+|^2 + 2 Re(eta) f |phi-+|^2 + Re<eta T.phi+-, phi-+>
    fibration: -H |phi-+|^2 + alpha/2 f Re<T.w.phi+-, phi-+>
    """
    phi = np.asarray(phi, dtype=complex)
    plus, minus = split(phi)
    H = np.asarray(H, dtype=float)
    f = np.asarray(f, dtype=float)
    result = []
    for same, other in ((plus, minus), (minus, plus)):
        n2_other = norm2(other)
        if geometry.is_product:
            eta = geometry.eta
            value = (-H * n2_other + 2.0 * np.real(eta) * f * n2_other
                     + re_herm(eta * clifford_mul(T, same), other))
        else:
            value = -H * n2_other + 0.5 * geometry.alpha * f * re_herm(
                clifford_mul(T, omega_mul(same)), other)
        result.append(value)
    return result[0], result[1]


def trace_identity_residual(field: SpinorField, data: AbstractData, algebraic: bool = False,
                            index: Optional[Sequence[int]] = None):
    """
    max over +- of |tr(Q+-) - closed form|.

    With algebraic=True the covariant derivative is replaced by the Killing
    right-hand side, so no differencing is involved.
    """
    _check_aligned(field, data)
    phi = field.values
    D = _killing_rhs_grid(field, data) if algebraic else covariant_derivatives(data, phi)
    Q_plus, Q_minus = _split_tensors(D, phi)
    expected_plus, expected_minus = trace_identity_expected(field.geometry, data.H, data.T,
                                                            data.f, phi)
    residual = np.maximum(np.abs(np.trace(Q_plus, axis1=-2, axis2=-1) - expected_plus),
                          np.abs(np.trace(Q_minus, axis1=-2, axis2=-1) - expected_minus))
    return _at(residual, index)


def half_dirac_residual(field: SpinorField, data: AbstractData,
                        index: Optional[Sequence[int]] = None):
    """
    max over +- of |D(phi+-) - (H phi-+ - 2 eta f phi-+ - eta T.phi+-)| (product geometries).
    """
    if not field.geometry.is_product:
        raise ModelSpaceError("Half-spinor Dirac identities are stated for product geometries")
    _check_aligned(field, data)
    eta = field.geometry.eta
    phi = field.values
    plus, minus = split(phi)
    nabla = covariant_derivatives(data, phi)
    residual = np.zeros(field.shape)
    for half, (same, other) in enumerate(((plus, minus), (minus, plus))):
        projected = split(nabla)[half]
        value = apply(GAMMA1, projected[..., 0, :]) + apply(GAMMA2, projected[..., 1, :])
        rhs = ((data.H[..., None] - 2.0 * eta * data.f[..., None]) * other
               - eta * clifford_mul(data.T, same))
        residual = np.maximum(residual, np.sqrt(norm2(value - rhs)))
    return _at(residual, index)


def spinor_df_residual(field: SpinorField, data: AbstractData, epsilon_zero: float = 1e-10,
                       index: Optional[Sequence[int]] = None):
    """|df + (2Q + B)(T) + tau J T| over the frame, zero where the spinor vanishes."""
    recovered = recover_A(field, data, epsilon_zero)
    df = frame_derivative(data, data.f)
    tau = 0.0 if field.geometry.is_product else field.geometry.tau
    predicted = -np.einsum("...ki,...k->...i", recovered, data.T) - tau * (data.T @ J.T)
    residual = np.sqrt(np.sum((df - predicted) ** 2, axis=-1))
    return _at(np.nan_to_num(residual, nan=0.0), index)


def min_norm(field: SpinorField) -> float:
    """Smallest |phi| over the grid."""
    return float(np.sqrt(np.min(field.norm2())))
