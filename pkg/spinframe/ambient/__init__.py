"""
Model geometries E(kappa, tau) and M^2(kappa) x R.
"""

from spinframe.ambient.curvature import (
    christoffel_numeric,
    curvature_closed,
    curvature_numeric,
    curvature_table,
)
from spinframe.ambient.frames import (
    canonical_frame,
    christoffel_closed,
    connection_table,
    metric_at,
    vector_product,
    vertical_field,
)
from spinframe.ambient.model_space import (
    AmbientPoint,
    AmbientVec,
    Basis,
    ModelFactory,
    ModelKind,
    ModelSpace,
)

__all__ = [
    "AmbientPoint",
    "AmbientVec",
    "Basis",
    "ModelFactory",
    "ModelKind",
    "ModelSpace",
    "canonical_frame",
    "christoffel_closed",
    "christoffel_numeric",
    "connection_table",
    "curvature_closed",
    "curvature_numeric",
    "curvature_table",
    "metric_at",
    "vector_product",
    "vertical_field",
]
