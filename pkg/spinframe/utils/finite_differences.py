"""
Finite Differences

Derivatives of fields sampled on the rectangular (u, v) grid. Axis 0 of a
grid array is u, axis 1 is v; any further axes are carried along.

Order 4 uses central stencils in the interior and fourth-order one-sided
stencils on the two outermost rows at each end; order 2 defers to
numpy.gradient with second-order edges.
"""

from typing import Tuple

import numpy as np

from spinframe.exceptions import StencilError

_CENTRAL4 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
# Stencils for the first and second row, offsets -i .. 4 - i.
_EDGE4 = (
    np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0,
    np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0,
)


def derivative(values: np.ndarray, spacing: float, axis: int = 0, order: int = 4) -> np.ndarray:
    """
    Differentiate a sampled field along one grid axis.

    Args:
        values: Samples, uniformly spaced along axis
        spacing: Grid step along axis
        axis: Axis to differentiate
        order: Accuracy order, 2 or 4

    Returns:
        Array of the same shape as values

    Raises:
        StencilError: Fewer than two samples or an unsupported order
    """
    if order not in (2, 4):
        raise StencilError(f"Finite-difference order must be 2 or 4, got {order}")
    values = np.asarray(values)
    n = values.shape[axis]
    if n < 2:
        raise StencilError(f"Cannot differentiate along an axis with {n} sample(s)")
    if order == 2 or n < 5:
        return np.gradient(values, spacing, axis=axis, edge_order=2 if n >= 3 else 1)

    f = np.moveaxis(values, axis, 0)
    out = np.empty_like(f)
    out[2:-2] = (_CENTRAL4[0] * f[:-4] + _CENTRAL4[1] * f[1:-3]
                 + _CENTRAL4[3] * f[3:-1] + _CENTRAL4[4] * f[4:])
    # Both edge rows read the five outermost samples; the far end is mirrored.
    for row, weights in enumerate(_EDGE4):
        out[row] = np.tensordot(weights, f[:5], axes=(0, 0))
        out[-1 - row] = -np.tensordot(weights, f[::-1][:5], axes=(0, 0))
    return np.moveaxis(out / spacing, 0, axis)


def grid_gradient(values: np.ndarray, du: float, dv: float,
                  order: int = 4) -> Tuple[np.ndarray, np.ndarray]:
    """Partial derivatives along u (axis 0) and v (axis 1)."""
    return derivative(values, du, 0, order), derivative(values, dv, 1, order)


def edge_mask(shape: Tuple[int, int], order: int = 4) -> np.ndarray:
    """
    Mask of grid points that use one-sided stencils.

    Residuals at these points are compared against twice the tolerance.
    """
    mask = np.zeros(shape, dtype=bool)
    for axis in (0, 1):
        n = shape[axis]
        w = 2 if order == 4 and n >= 5 else 1
        index = [slice(None), slice(None)]
        index[axis] = slice(0, min(w, n))
        mask[tuple(index)] = True
        index[axis] = slice(max(n - w, 0), n)
        mask[tuple(index)] = True
    return mask


def convergence_ratio(coarse: float, fine: float, floor: float = 0.0) -> Tuple[float, bool]:
    """
    Ratio of residuals at two resolutions and whether it shows convergence.

    Args:
        coarse: Residual at the coarse grid
        fine: Residual at the grid with half the spacing
        floor: Residuals at or below this level count as converged

    Returns:
        (ratio, passed) where passed means coarse <= floor or ratio >= 3
    """
    if fine <= 0.0:
        ratio = float("inf") if coarse > 0.0 else 1.0
    else:
        ratio = coarse / fine
    return ratio, bool(coarse <= floor or ratio >= 3.0)
