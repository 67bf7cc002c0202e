"""
Path Integration

Integration of first-order systems along the grid lines of the parameter
domain: transport of a spinor by the generalized Killing equation, and
reconstruction of an immersion from abstract data by the Gauss-Weingarten
system. Both integrate along two lexicographic paths (u then v, v then u)
from the base corner and report their disagreement, which vanishes for
integrable data on the simply connected rectangle.

Steps are classical RK4 with the step equal to the grid spacing; field
values at half steps come from cubic interpolation of the grid values.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from spinframe.ambient import frames
from spinframe.ambient.model_space import AmbientPoint, PointLike
from spinframe.clifford import OMEGA, Spinor, norm2
from spinframe.compat import AbstractData, worst_residual
from spinframe.exceptions import (
    BaseFrameError,
    ChartExit,
    CompatGateFailed,
    FrameDrift,
    GridMismatch,
    SpinorVanishes,
    StepUnstable,
)
from spinframe.spinfield import SpinGeometry, SpinorField, killing_operator

logger = logging.getLogger(__name__)

# Weights of the half-step value from four consecutive samples.
_MID_CENTRAL = np.array([-1.0, 9.0, 9.0, -1.0]) / 16.0
_MID_FIRST = np.array([5.0, 15.0, -5.0, 1.0]) / 16.0
_MID_LAST = _MID_FIRST[::-1]


def midpoints(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """
    Cubic interpolation of a sampled field halfway between consecutive samples.

    Args:
        values: Samples along axis, uniformly spaced
        axis: Axis of the samples

    Returns:
        Array with one sample fewer along axis
    """
    f = np.moveaxis(np.asarray(values), axis, 0)
    n = f.shape[0]
    if n < 4:
        return np.moveaxis(0.5 * (f[:-1] + f[1:]), 0, axis)
    out = np.empty((n - 1,) + f.shape[1:], dtype=np.result_type(f, float))
    out[1:-1] = (_MID_CENTRAL[0] * f[:-3] + _MID_CENTRAL[1] * f[1:-2]
                 + _MID_CENTRAL[2] * f[2:-1] + _MID_CENTRAL[3] * f[3:])
    out[0] = np.tensordot(_MID_FIRST, f[:4], axes=(0, 0))
    out[-1] = np.tensordot(_MID_LAST, f[-4:], axes=(0, 0))
    return np.moveaxis(out, 0, axis)


def rk4_line(rhs: Callable[[Any, int, str], Any], state0, n: int, h: float,
             after_step: Optional[Callable[[Any, int], Any]] = None) -> list:
    """
    Integrate y' = rhs(y, k, where) over n - 1 steps of size h.

    The right-hand side receives the step index k and "node", "mid" or "next"
    for the sample it should use. after_step may project or check the state
    and returns the state to continue from.

    Returns:
        States at the n nodes
    """
    states = [state0]
    y = state0
    for k in range(n - 1):
        k1 = rhs(y, k, "node")
        k2 = rhs(_axpy(y, 0.5 * h, k1), k, "mid")
        k3 = rhs(_axpy(y, 0.5 * h, k2), k, "mid")
        k4 = rhs(_axpy(y, h, k3), k, "next")
        y = _combine(y, h / 6.0, k1, k2, k3, k4)
        if after_step is not None:
            y = after_step(y, k + 1)
        states.append(y)
    return states


def _axpy(y, a, k):
    if isinstance(y, tuple):
        return tuple(yi + a * ki for yi, ki in zip(y, k))
    return y + a * k


def _combine(y, w, k1, k2, k3, k4):
    if isinstance(y, tuple):
        return tuple(yi + w * (a + 2.0 * b + 2.0 * c + d)
                     for yi, a, b, c, d in zip(y, k1, k2, k3, k4))
    return y + w * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _pick(nodes: np.ndarray, mids: np.ndarray, k: int, where: str) -> np.ndarray:
    if where == "node":
        return nodes[k]
    if where == "mid":
        return mids[k]
    return nodes[k + 1]


def _check_gate(data: AbstractData, gate: Optional[float], what: str) -> Dict[str, Any]:
    worst = worst_residual(data)
    if gate is not None and worst["value"] > gate:
        raise CompatGateFailed(
            f"{what} refused: compatibility residual {worst['name']} = {worst['value']:.3e} "
            f"exceeds gate {gate:g} at grid index {worst['index']}", worst)
    return worst


def _numerics(config: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    return dict((config or {}).get("numerics", {}))


# Spinor transport


@dataclass
class TransportResult:
    """
    Spinor field obtained by integrating the Killing equation from a seed.

    Attributes:
        field: Field along the u-then-v paths
        seed: Value at the base corner
        holonomy: |phi_path1 - phi_path2| per grid point
        norm_drift: max ||phi|^2 - |seed|^2|
        min_norm: Smallest |phi| on the grid
        compat: Worst compatibility residual of the input data
    """

    field: SpinorField
    seed: Spinor
    holonomy: np.ndarray
    norm_drift: float
    min_norm: float
    compat: Dict[str, Any] = field(default_factory=dict)

    @property
    def holonomy_defect(self) -> float:
        return float(np.max(self.holonomy))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "geometry": self.field.geometry.to_dict(),
            "seed": [float(s) for s in self.seed.to_seed()],
            "holonomy_defect": self.holonomy_defect,
            "norm_drift": self.norm_drift,
            "min_norm": self.min_norm,
        }


def transport_generators(data: AbstractData, geometry: SpinGeometry) -> np.ndarray:
    """
    Matrices L_c with d_c phi = L_c phi for solutions of the Killing equation.

    Returns:
        Complex array, shape (nu, nv, 2, 2, 2) with axis 2 the direction c
    """
    rows = []
    for i in (0, 1):
        X = np.broadcast_to(np.eye(2)[i], data.T.shape)
        rows.append(killing_operator(geometry, data.A, data.T, data.f, X)
                    - 0.5 * data.omega[..., i, None, None] * OMEGA)
    K = np.stack(rows, axis=2)
    return np.einsum("...ci,...ikl->...ckl", data.P, K)


def _transport_line(L_nodes: np.ndarray, phi0: np.ndarray, h: float, seed_norm: float,
                    blowup: float) -> np.ndarray:
    """Integrate phi' = L phi along axis 0 of L_nodes for a batch of lines."""
    L_mid = midpoints(L_nodes, 0)

    def rhs(phi, k, where):
        return np.einsum("...ij,...j->...i", _pick(L_nodes, L_mid, k, where), phi)

    def guard(phi, k):
        n = np.sqrt(norm2(phi))
        if np.any(n > blowup * seed_norm) or np.any(n < seed_norm / blowup):
            raise StepUnstable(f"Spinor norm left [{seed_norm / blowup:.3g}, "
                               f"{seed_norm * blowup:.3g}] after step {k}",
                               {"step": k, "max_norm": float(np.max(n)),
                                "min_norm": float(np.min(n))})
        return phi

    return np.stack(rk4_line(rhs, phi0, L_nodes.shape[0], h, guard))


def transport_spinor(data: AbstractData, seed, geometry: SpinGeometry,
                     config: Optional[Dict[str, Any]] = None,
                     gate: Optional[float] = None) -> TransportResult:
    """
    Transport a seed spinor over the grid by the generalized Killing equation.

    Args:
        data: Abstract data
        seed: Spinor, or [re1, im1, re2, im2], at the base corner (0, 0)
        geometry: Spin geometry of the Killing equation
        config: Spinframe configuration ("numerics" section)
        gate: Compatibility gate; defaults to numerics.compat_gate. The check
            is skipped for an infinite gate or a configured value of None

    Returns:
        TransportResult

    Raises:
        SpinorVanishes: If the seed is zero
        CompatGateFailed: If the data violate the compatibility equations
        StepUnstable: If |phi| leaves [|seed| / norm_blowup, |seed| * norm_blowup]
    """
    numerics = _numerics(config)
    if gate is None:
        gate = numerics.get("compat_gate", 1e-3)
    blowup = float(numerics.get("norm_blowup", 10.0))
    if not isinstance(seed, Spinor):
        seed = Spinor.from_seed(seed)
    seed_norm = float(seed.norm())
    if not seed_norm > 0.0:
        raise SpinorVanishes("Seed spinor is zero")
    compat = _check_gate(data, gate, "Spinor transport")

    L = transport_generators(data, geometry)
    L_u, L_v = L[..., 0, :, :], L[..., 1, :, :]
    phi0 = seed.components

    # u then v
    first = _transport_line(L_u[:, 0], phi0, data.du, seed_norm, blowup)
    path1 = np.swapaxes(_transport_line(np.swapaxes(L_v, 0, 1), first, data.dv,
                                        seed_norm, blowup), 0, 1)
    # v then u
    first = _transport_line(L_v[0, :], phi0, data.dv, seed_norm, blowup)
    path2 = _transport_line(L_u, first, data.du, seed_norm, blowup)

    path1[0, 0] = phi0
    holonomy = np.sqrt(norm2(path1 - path2))
    result = TransportResult(
        field=SpinorField(path1, geometry),
        seed=seed,
        holonomy=holonomy,
        norm_drift=float(np.max(np.abs(norm2(path1) - seed_norm ** 2))),
        min_norm=float(np.sqrt(np.min(norm2(path1)))),
        compat=compat,
    )
    logger.info(f"Transported seed over {list(data.shape)} grid: holonomy defect "
                f"{result.holonomy_defect:.3e}, norm drift {result.norm_drift:.3e}")
    return result


# Immersion reconstruction


@dataclass
class ReconstructionResult:
    """
    Immersion rebuilt from abstract data.

    Attributes:
        points: Chart points F(u, v), shape (nu, nv, 3)
        frames: Rows E1, E2, nu in canonical-frame components, shape (nu, nv, 3, 3)
        frames_chart: The same rows in chart components
        frame_drift: Largest orthonormality defect before projection
        path_defect: max |F_path1 - F_path2|
        vertical_defect: max |xi - (T1 E1 + T2 E2 + f nu)|
        compat: Worst compatibility residual of the input data
    """

    points: np.ndarray
    frames: np.ndarray
    frames_chart: np.ndarray
    frame_drift: float
    path_defect: float
    vertical_defect: float
    compat: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "frame_drift": self.frame_drift,
            "path_defect": self.path_defect,
            "vertical_defect": self.vertical_defect,
            "compat": self.compat,
        }


def adapted_frame(T: Sequence[float], f: float) -> np.ndarray:
    """
    An oriented orthonormal frame (E1, E2, nu), in canonical-frame components,
    with e3 = T1 E1 + T2 E2 + f nu.
    """
    t1, t2 = float(T[0]), float(T[1])
    t = float(np.hypot(t1, t2))
    if t < 1e-12:
        sign = 1.0 if f >= 0.0 else -1.0
        return np.array([[1.0, 0.0, 0.0], [0.0, sign, 0.0], [0.0, 0.0, sign]])
    along = np.array([-f, 0.0, t])
    across = np.array([0.0, -1.0, 0.0])
    normal = np.array([t, 0.0, f])
    e1 = (t1 * along - t2 * across) / t
    e2 = (t2 * along + t1 * across) / t
    return np.stack([e1, e2, normal])


def _polar(R: np.ndarray) -> np.ndarray:
    U, _, Vt = np.linalg.svd(R)
    return U @ Vt


def reconstruct_immersion(data: AbstractData, base: PointLike, base_frame=None,
                          config: Optional[Dict[str, Any]] = None,
                          gate: Optional[float] = None) -> ReconstructionResult:
    """
    Integrate the Gauss-Weingarten system from a base point and frame.

    Along d_c the state (F, E1, E2, nu) evolves by
        dF = E(F) V,  V = P[c, 0] E1 + P[c, 1] E2
        dE1 = w E2 + (A X)_1 nu - Gamma(V, E1)
        dE2 = -w E1 + (A X)_2 nu - Gamma(V, E2)
        dnu = -(A X)_1 E1 - (A X)_2 E2 - Gamma(V, nu)
    in canonical-frame components, with X = d_c and w = omega12(d_c).

    Args:
        data: Abstract data
        base: Chart point of the base corner (0, 0)
        base_frame: Rows E1, E2, nu at the base in chart components; an
            adapted frame is chosen when omitted
        config: Spinframe configuration ("numerics" section)
        gate: Compatibility gate; defaults to numerics.compat_gate
            (math.inf disables it)

    Returns:
        ReconstructionResult

    Raises:
        CompatGateFailed: If the data violate the compatibility equations
        BaseFrameError: If the base frame is not orthonormal or not adapted
        ChartExit: If the immersion leaves the chart
        FrameDrift: If the frame drifts from orthonormal by more than frame_drift_max
    """
    numerics = _numerics(config)
    if gate is None:
        gate = numerics.get("compat_gate", 1e-3)
    drift_max = float(numerics.get("frame_drift_max", 1e-3))
    m = data.model
    compat = _check_gate(data, gate, "Reconstruction")

    p0 = base.as_array() if isinstance(base, AmbientPoint) else np.asarray(base, dtype=float)
    if not frames.in_chart(m, p0[0], p0[1]):
        raise ChartExit(f"Reconstruction base point {p0.tolist()} lies outside the chart of {m.name}",
                        {"step": 0, "point": p0.tolist()})
    if base_frame is None:
        R0 = adapted_frame(data.T[0, 0], data.f[0, 0])
    else:
        R0 = np.asarray(base_frame, dtype=float) @ frames.coframe_matrix(m, p0).T
        defect = float(np.max(np.abs(R0 @ R0.T - np.eye(3))))
        if defect > 1e-6:
            raise BaseFrameError(f"Base frame is not orthonormal (defect {defect:.3e})",
                                 {"defect": defect})
        if np.linalg.det(R0) < 0.0:
            raise BaseFrameError("Base frame is not positively oriented")
    vertical = np.array([data.T[0, 0, 0], data.T[0, 0, 1], data.f[0, 0]]) @ R0
    adapted = float(np.linalg.norm(vertical - np.array([0.0, 0.0, 1.0])))
    if adapted > 1e-6:
        raise BaseFrameError(f"Base frame is not adapted to (T, f): defect {adapted:.3e}",
                             {"defect": adapted})

    # (A X)_i for X = d_c, indexed [..., c, i].
    AP = np.einsum("...ij,...cj->...ci", data.A, data.P)
    drift = [0.0]

    def line(c: int, P_nodes, AX_nodes, w_nodes, p_start, R_start):
        """Integrate along d_c; axis 0 of the coefficient arrays runs along the line."""
        P_mid, AX_mid, w_mid = (midpoints(a, 0) for a in (P_nodes, AX_nodes, w_nodes))
        h = data.du if c == 0 else data.dv

        def rhs(state, k, where):
            p, R = state
            Pc = _pick(P_nodes, P_mid, k, where)
            AX = _pick(AX_nodes, AX_mid, k, where)
            w = _pick(w_nodes, w_mid, k, where)[..., None]
            E1, E2, nu = R[..., 0, :], R[..., 1, :], R[..., 2, :]
            V = Pc[..., 0, None] * E1 + Pc[..., 1, None] * E2
            dp = np.einsum("...aj,...j->...a", frames.frame_matrix(m, p), V)
            table = frames.connection_table(m, p)
            dE1 = w * E2 + AX[..., 0, None] * nu - frames.covariant_frame(table, V, E1)
            dE2 = -w * E1 + AX[..., 1, None] * nu - frames.covariant_frame(table, V, E2)
            dnu = (-AX[..., 0, None] * E1 - AX[..., 1, None] * E2
                   - frames.covariant_frame(table, V, nu))
            return dp, np.stack([dE1, dE2, dnu], axis=-2)

        def after_step(state, k):
            p, R = state
            ok = np.atleast_1d(frames.in_chart(m, p[..., 0], p[..., 1]))
            if not np.all(ok):
                bad = int(np.argwhere(~ok)[0][0])
                raise ChartExit(f"Reconstructed immersion leaves the chart of {m.name} "
                                f"after step {k} along {'uv'[c]}",
                                {"step": k, "line": bad,
                                 "point": np.reshape(p, (-1, 3))[bad].tolist()})
            gram = np.einsum("...ik,...jk->...ij", R, R)
            defect = float(np.max(np.abs(gram - np.eye(3))))
            drift[0] = max(drift[0], defect)
            if defect > drift_max:
                raise FrameDrift(f"Frame drift {defect:.3e} exceeds {drift_max:g} after step {k}",
                                 {"step": k, "drift": defect})
            return p, _polar(R)

        states = rk4_line(rhs, (p_start, R_start), P_nodes.shape[0], h, after_step)
        return np.stack([s[0] for s in states]), np.stack([s[1] for s in states])

    coefficients = [(data.P[..., c, :], AP[..., c, :], data.omega_coord[..., c]) for c in (0, 1)]

    def swapped(arrays):
        return tuple(np.swapaxes(a, 0, 1) for a in arrays)

    # u then v
    p_line, R_line = line(0, *(a[:, 0] for a in coefficients[0]), p0, R0)
    points1, frames1 = line(1, *swapped(coefficients[1]), p_line, R_line)
    points1, frames1 = np.swapaxes(points1, 0, 1), np.swapaxes(frames1, 0, 1)
    # v then u
    p_line, R_line = line(1, *(a[0] for a in coefficients[1]), p0, R0)
    points2, _ = line(0, *coefficients[0], p_line, R_line)

    vertical_field = (data.T[..., 0, None] * frames1[..., 0, :]
                      + data.T[..., 1, None] * frames1[..., 1, :]
                      + data.f[..., None] * frames1[..., 2, :])
    vertical_defect = float(np.max(np.linalg.norm(vertical_field - np.array([0.0, 0.0, 1.0]),
                                                  axis=-1)))
    chart = np.einsum("...aj,...ij->...ia", frames.frame_matrix(m, points1), frames1)
    result = ReconstructionResult(
        points=points1,
        frames=frames1,
        frames_chart=chart,
        frame_drift=drift[0],
        path_defect=float(np.max(np.linalg.norm(points1 - points2, axis=-1))),
        vertical_defect=vertical_defect,
        compat=compat,
    )
    logger.info(f"Reconstructed {data.shape[0]}x{data.shape[1]} immersion in {m.name}: path "
                f"defect {result.path_defect:.3e}, frame drift {result.frame_drift:.3e}")
    return result


def compare_up_to_base_alignment(F1: np.ndarray, F2: np.ndarray,
                                 base_index: Tuple[int, int] = (0, 0)) -> float:
    """
    Largest chart distance between two immersions on the same grid.

    The second immersion is first shifted along the fibre direction so that
    both base points share their z coordinate; vertical translations are
    isometries of every model space.

    Raises:
        GridMismatch: If the grids differ
    """
    F1 = np.asarray(F1, dtype=float)
    F2 = np.asarray(F2, dtype=float)
    if F1.shape != F2.shape:
        raise GridMismatch(f"Cannot compare immersions on grids {list(F1.shape[:-1])} and "
                           f"{list(F2.shape[:-1])}")
    shift = np.zeros(3)
    shift[2] = F1[base_index][2] - F2[base_index][2]
    return float(np.max(np.linalg.norm(F1 - (F2 + shift), axis=-1)))
