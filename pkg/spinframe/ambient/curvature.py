"""
Ambient Curvature

Closed-form curvature tensor of the model spaces and the independent
finite-difference oracles it is checked against.

Conventions: R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
and the four-slot value R(X, Y, Z, W) = <R(X, Y)W, Z>, so that R(X, Y, X, Y)
is the sectional curvature of an orthonormal pair. With xi the vertical field,

    R(X, Y, Z, W) = (kappa - 3 tau^2) (<X,Z><Y,W> - <X,W><Y,Z>)
                  - (kappa - 4 tau^2) (<X,Z><Y,xi><W,xi> + <Y,W><X,xi><Z,xi>
                                       - <X,W><Y,xi><Z,xi> - <Y,Z><X,xi><W,xi>)

which for tau = 0 is the curvature of M^2(kappa) x R.
"""

import logging
from typing import Any, Dict, Optional

import numpy as np

from spinframe.ambient import frames
from spinframe.ambient.model_space import (
    AmbientPoint,
    AmbientVec,
    Basis,
    ModelSpace,
    PointLike,
    point_coords,
)

logger = logging.getLogger(__name__)

VERTICAL = np.array([0.0, 0.0, 1.0])


def _frame_components(m: ModelSpace, v) -> np.ndarray:
    if isinstance(v, AmbientVec):
        return frames.to_frame(m, v).components
    return np.asarray(v, dtype=float)


def _chart_components(m: ModelSpace, v) -> np.ndarray:
    if isinstance(v, AmbientVec):
        return frames.to_chart(m, v).components
    return np.asarray(v, dtype=float)


def _check_common_point(*vectors) -> None:
    points = {v.point for v in vectors if isinstance(v, AmbientVec) and v.point is not None}
    if len(points) > 1:
        raise ValueError(f"Curvature of vectors at different points: {sorted(map(str, points))}")


def curvature_closed(m: ModelSpace, X, Y, Z, W, xi=None) -> np.ndarray:
    """
    Closed-form R(X, Y, Z, W) = <R(X, Y)W, Z>.

    Args:
        m: Model space
        X, Y, Z, W: AmbientVecs at a common point, or arrays of canonical-frame
            components with trailing axis 3
        xi: Vertical field in the same components (defaults to e3)

    Returns:
        Curvature value(s), broadcast over leading axes

    Raises:
        ValueError: If the vectors live at different points
    """
    _check_common_point(X, Y, Z, W)
    x, y, z, w = (_frame_components(m, v) for v in (X, Y, Z, W))
    e3 = VERTICAL if xi is None else _frame_components(m, xi)

    def dot(a, b):
        return np.sum(a * b, axis=-1)

    xz, yw, xw, yz = dot(x, z), dot(y, w), dot(x, w), dot(y, z)
    xv, yv, zv, wv = dot(x, e3), dot(y, e3), dot(z, e3), dot(w, e3)
    constant = xz * yw - xw * yz
    vertical = xz * yv * wv + yw * xv * zv - xw * yv * zv - yz * xv * wv
    return (m.kappa - 3.0 * m.tau ** 2) * constant - (m.kappa - 4.0 * m.tau ** 2) * vertical


def curvature_normal(m: ModelSpace, X, Y, nu, xi=None) -> np.ndarray:
    """
    Frame components of R(X, Y)nu, i.e. the vector with <R(X, Y)nu, Z> = R(X, Y, Z, nu).

    Arrays carry canonical-frame components with trailing axis 3.
    """
    basis = np.eye(3)
    x, y, n = (_frame_components(m, v) for v in (X, Y, nu))
    return np.stack([curvature_closed(m, x, y, basis[k], n, xi) for k in range(3)], axis=-1)


def coordinate_christoffel(m: ModelSpace, p: PointLike, h: float = 1e-4) -> np.ndarray:
    """
    Chart Christoffel symbols C[c, a, b] = Gamma^c_ab by central differences of the metric.

    Raises:
        ChartDomainError: If the stencil leaves the chart
    """
    base = np.array(point_coords(p), dtype=float)
    dg = np.zeros((3, 3, 3))
    for a in range(3):
        step = np.zeros(3)
        step[a] = h
        dg[a] = (frames.metric_at(m, base + step) - frames.metric_at(m, base - step)) / (2.0 * h)
    g_inv = np.linalg.inv(frames.metric_at(m, base))
    # lowered[d, a, b] = 1/2 (d_a g_bd + d_b g_ad - d_d g_ab)
    lowered = 0.5 * (np.einsum("abd->dab", dg) + np.einsum("bad->dab", dg) - dg)
    return np.einsum("cd,dab->cab", g_inv, lowered)


def connection_numeric(m: ModelSpace, p: PointLike, h: float = 1e-4) -> np.ndarray:
    """
    <nabla_{e_i} e_j, e_k> for all index triples from the Koszul formula.

    Metric coefficients and frame fields are both differentiated by central
    differences with step h; nothing from the closed-form table is used.
    """
    base = np.array(point_coords(p), dtype=float)
    christoffel = coordinate_christoffel(m, base, h)
    frame = frames.frame_matrix(m, base)
    dframe = np.zeros((3, 3, 3))
    for a in range(3):
        step = np.zeros(3)
        step[a] = h
        dframe[a] = (frames.frame_matrix(m, base + step)
                     - frames.frame_matrix(m, base - step)) / (2.0 * h)
    g = frames.metric_at(m, base)
    # nabla_{e_i} e_j = e_i^a d_a e_j^c + e_i^a e_j^b Gamma^c_ab
    derivative = np.einsum("ai,acj->ijc", frame, dframe)
    derivative += np.einsum("ai,bj,cab->ijc", frame, frame, christoffel)
    return np.einsum("ijc,cd,dk->ijk", derivative, g, frame)


def christoffel_numeric(m: ModelSpace, p: PointLike, i: int, j: int, k: int,
                        h: float = 1e-4) -> float:
    """
    Finite-difference oracle for <nabla_{e_i} e_j, e_k>, indices 1..3.

    Raises:
        ChartDomainError: If the differencing stencil leaves the chart
    """
    for index in (i, j, k):
        if index not in (1, 2, 3):
            raise ValueError(f"Frame index must be 1, 2 or 3, got {index}")
    return float(connection_numeric(m, p, h)[i - 1, j - 1, k - 1])


def riemann_numeric(m: ModelSpace, p: PointLike, h: float = 1e-4) -> np.ndarray:
    """
    Coordinate Riemann tensor Rm[d, a, b, c] = R^d_abc with R(d_a, d_b)d_c = R^d_abc d_d.

    Christoffels come from coordinate_christoffel and are differentiated once
    more by central differences.
    """
    base = np.array(point_coords(p), dtype=float)
    christoffel = coordinate_christoffel(m, base, h)
    dchristoffel = np.zeros((3, 3, 3, 3))
    for a in range(3):
        step = np.zeros(3)
        step[a] = h
        dchristoffel[a] = (coordinate_christoffel(m, base + step, h)
                           - coordinate_christoffel(m, base - step, h)) / (2.0 * h)
    # dchristoffel[a, d, b, c] = d_a Gamma^d_bc
    rm = np.einsum("adbc->dabc", dchristoffel) - np.einsum("bdac->dabc", dchristoffel)
    rm += np.einsum("dae,ebc->dabc", christoffel, christoffel)
    rm -= np.einsum("dbe,eac->dabc", christoffel, christoffel)
    return rm


def curvature_numeric(m: ModelSpace, p: PointLike, X, Y, Z, W, h: float = 1e-4) -> float:
    """
    Finite-difference oracle for R(X, Y, Z, W) = <R(X, Y)W, Z>.

    Args:
        m: Model space
        p: Point
        X, Y, Z, W: AmbientVecs (either basis) or chart-component arrays
        h: Differencing step

    Raises:
        ChartDomainError: If the stencil leaves the chart
    """
    base = np.array(point_coords(p), dtype=float)
    point = AmbientPoint(*base)
    vectors = []
    for v in (X, Y, Z, W):
        if isinstance(v, AmbientVec) and v.point is None:
            v = AmbientVec(v.components, v.basis, point)
        vectors.append(_chart_components(m, v))
    x, y, z, w = vectors
    rm = riemann_numeric(m, base, h)
    g = frames.metric_at(m, base)
    return float(np.einsum("de,dabc,a,b,c,e->", g, rm, x, y, w, z))


def frame_vectors(m: ModelSpace, p: PointLike):
    """Canonical frame at p as FRAME-basis AmbientVecs, for curvature calls."""
    if isinstance(p, AmbientPoint):
        point = p
    else:
        point = AmbientPoint.from_sequence(np.asarray(p, dtype=float).tolist())
    return tuple(AmbientVec(row, Basis.FRAME, point) for row in np.eye(3))


def curvature_table(m: ModelSpace, samples: int = 20, seed: int = 0, h: float = 1e-4,
                    radius: Optional[float] = None) -> Dict[str, Any]:
    """
    Compare closed-form and numeric curvature on random points and quadruples.

    Args:
        m: Model space
        samples: Number of random chart points
        seed: Seed of the numpy generator
        h: Differencing step of the oracles
        radius: Half-width of the sampling box (defaults to a safe chart box)

    Returns:
        Dictionary with the canonical-frame diagonal, the closed-form values
        and the maximal deviations
    """
    rng = np.random.default_rng(seed)
    if radius is None:
        chart = m.chart_radius()
        radius = 0.5 * chart if chart is not None else 1.0
    diagonal_pairs = ((1, 2), (1, 3), (2, 3))
    expected = {
        "e2e3": m.tau ** 2,
        "e1e3": m.tau ** 2,
        "e1e2": m.kappa - 3.0 * m.tau ** 2,
    }
    max_diag = 0.0
    max_quad = 0.0
    max_christoffel = 0.0
    diagonal_sum = {name: 0.0 for name in expected}
    for _ in range(samples):
        xy = rng.uniform(-radius, radius, size=2)
        p = np.array([xy[0], xy[1], rng.uniform(-1.0, 1.0)])
        frame = frame_vectors(m, p)
        for i, j in diagonal_pairs:
            name = f"e{i}e{j}"
            value = curvature_numeric(m, p, frame[i - 1], frame[j - 1], frame[i - 1], frame[j - 1], h)
            diagonal_sum[name] += value
            max_diag = max(max_diag, abs(value - expected[name]))
        quad = rng.normal(size=(4, 3))
        point = AmbientPoint(*p)
        vecs = [AmbientVec(q, Basis.FRAME, point) for q in quad]
        closed = float(curvature_closed(m, *vecs))
        numeric = curvature_numeric(m, p, *vecs, h=h)
        max_quad = max(max_quad, abs(closed - numeric))
        table = frames.connection_table(m, p)
        deviation = np.max(np.abs(table - connection_numeric(m, p, h)))
        max_christoffel = max(max_christoffel, float(deviation))
    logger.info(f"Curvature table for {m.name}: diag deviation {max_diag:.3e}, "
                f"quadruple deviation {max_quad:.3e}")
    return {
        "model": m.to_dict(),
        "samples": samples,
        "seed": seed,
        "expected_diagonal": expected,
        "mean_diagonal": {k: v / max(samples, 1) for k, v in diagonal_sum.items()},
        "max_diagonal_deviation": max_diag,
        "max_quadruple_deviation": max_quad,
        "max_christoffel_deviation": max_christoffel,
    }
