"""
Spinframe

Spin geometry of surfaces in the homogeneous 3-manifolds E(kappa, tau) and
M^2(kappa) x R: extrinsic data extraction, compatibility residuals,
generalized Killing spinors and immersion reconstruction.
"""

__version__ = "0.1.0"

from spinframe.ambient import ModelFactory, ModelSpace
from spinframe.clifford import Spinor, TangentVec2
from spinframe.compat import AbstractData, residual_fields
from spinframe.exceptions import SpinframeError
from spinframe.integrate import reconstruct_immersion, transport_spinor
from spinframe.spinfield import SpinGeometry, SpinGeometryFactory, SpinorField
from spinframe.surface import ExtrinsicData, SurfaceScene, extract

__all__ = [
    "AbstractData",
    "ExtrinsicData",
    "ModelFactory",
    "ModelSpace",
    "SpinGeometry",
    "SpinGeometryFactory",
    "Spinor",
    "SpinorField",
    "SpinframeError",
    "SurfaceScene",
    "TangentVec2",
    "__version__",
    "extract",
    "reconstruct_immersion",
    "residual_fields",
    "transport_spinor",
]
