"""
Model Spaces

The homogeneous 3-manifolds E(kappa, tau) (tau != 0, Riemannian fibrations
over M^2(kappa) with bundle curvature tau) and the products M^2(kappa) x R
(tau = 0), together with the point and vector types of their global chart.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum, auto
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from spinframe.exceptions import ModelSpaceError

logger = logging.getLogger(__name__)


class ModelKind(Enum):
    """Whether the vertical field is parallel (product) or not (fibration)."""
    PRODUCT = auto()
    FIBRATION = auto()


class Basis(Enum):
    """Basis in which the components of an ambient vector are expressed."""
    CHART = auto()
    FRAME = auto()


@dataclass(frozen=True)
class ModelSpace:
    """
    Model geometry with base curvature kappa and bundle curvature tau.

    Attributes:
        kappa: Curvature of the base surface M^2(kappa)
        tau: Bundle curvature; zero selects the product M^2(kappa) x R
        lambda_min: Smallest conformal factor accepted inside the chart
    """

    kappa: float
    tau: float
    lambda_min: float = field(default=1e-3, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and math.isfinite(self.tau)):
            raise ModelSpaceError(f"kappa and tau must be finite, got ({self.kappa}, {self.tau})")
        if self.kappa == 0.0 and self.tau == 0.0:
            raise ModelSpaceError("kappa = tau = 0 is flat R^3, not a model with 4-dimensional "
                                  "isometry group", {"kappa": 0.0, "tau": 0.0})
        if not 0.0 < self.lambda_min < 1.0:
            raise ModelSpaceError(f"lambda_min must lie in (0, 1), got {self.lambda_min}")

    @property
    def kind(self) -> ModelKind:
        return ModelKind.PRODUCT if self.tau == 0.0 else ModelKind.FIBRATION

    @property
    def is_product(self) -> bool:
        return self.kind is ModelKind.PRODUCT

    @property
    def sigma(self) -> float:
        """Rotation speed kappa / (2 tau) of the frame along the fibers (0 for products)."""
        if self.is_product:
            return 0.0
        return self.kappa / (2.0 * self.tau)

    @property
    def alpha(self) -> float:
        """The constant 2 tau - kappa / (2 tau); undefined for products."""
        if self.is_product:
            raise ModelSpaceError("alpha = 2 tau - kappa / (2 tau) is undefined when tau = 0")
        return 2.0 * self.tau - self.kappa / (2.0 * self.tau)

    @property
    def name(self) -> str:
        if self.is_product:
            return f"M2({self.kappa:g}) x R"
        if self.kappa == 0.0:
            return f"Nil3({self.tau:g})"
        return f"E({self.kappa:g}, {self.tau:g})"

    def chart_radius(self) -> Optional[float]:
        """Radius of the disk chart of the base when kappa < 0, else None."""
        if self.kappa < 0.0:
            return 2.0 / math.sqrt(-self.kappa)
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {"kappa": self.kappa, "tau": self.tau, "kind": self.kind.name.lower()}


@dataclass(frozen=True)
class AmbientPoint:
    """Chart coordinates (x, y, z) of a point."""

    x: float
    y: float
    z: float

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "AmbientPoint":
        if len(values) != 3:
            raise ValueError(f"An ambient point needs 3 coordinates, got {len(values)}")
        return cls(*(float(v) for v in values))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


PointLike = Union[AmbientPoint, Sequence[float], np.ndarray]


def point_coords(p: PointLike) -> Tuple[Any, Any, Any]:
    """Split a point (or an array with trailing axis 3) into x, y, z."""
    if isinstance(p, AmbientPoint):
        return p.x, p.y, p.z
    arr = np.asarray(p, dtype=float)
    return arr[..., 0], arr[..., 1], arr[..., 2]


@dataclass(eq=False)
class AmbientVec:
    """
    Tangent vector of the model space at a point.

    Attributes:
        components: Three real components
        basis: Chart basis (d/dx, d/dy, d/dz) or canonical frame (e1, e2, e3)
        point: Base point of the vector
    """

    components: np.ndarray
    basis: Basis
    point: Optional[AmbientPoint] = None

    def __post_init__(self):
        self.components = np.asarray(self.components, dtype=float)
        if self.components.shape[-1:] != (3,):
            raise ValueError(f"AmbientVec needs 3 components, got {self.components.shape}")
        if not isinstance(self.basis, Basis):
            raise ValueError(f"AmbientVec basis must be a Basis, got {self.basis!r}")


class ModelFactory:
    """
    Factory for model spaces.

    Besides explicit (kappa, tau) pairs it knows the named geometries used by
    the shipped fixtures.
    """

    NAMED = {
        "nil3": (0.0, 0.5),
        "berger": (4.0, 1.0),
        "psl2": (-1.0, 0.8),
        "s2xr": (1.0, 0.0),
        "h2xr": (-1.0, 0.0),
    }

    @staticmethod
    def create_model(kappa: float, tau: float, lambda_min: float = 1e-3) -> ModelSpace:
        """
        Create a model space.

        Args:
            kappa: Base curvature
            tau: Bundle curvature
            lambda_min: Chart clamp for the conformal factor

        Returns:
            ModelSpace instance

        Raises:
            ModelSpaceError: If (kappa, tau) = (0, 0) or the values are not finite
        """
        model = ModelSpace(float(kappa), float(tau), lambda_min)
        logger.debug(f"Created model {model.name}")
        return model

    @staticmethod
    def from_dict(data: Dict[str, Any], lambda_min: float = 1e-3) -> ModelSpace:
        """Create a model from a {"kappa": ..., "tau": ...} or {"name": ...} mapping."""
        if not isinstance(data, dict):
            raise ModelSpaceError(f"Model must be an object, got {type(data).__name__}")
        if "name" in data:
            return ModelFactory.create_named(data["name"], lambda_min)
        try:
            return ModelFactory.create_model(data["kappa"], data["tau"], lambda_min)
        except KeyError as e:
            raise ModelSpaceError(f"Model is missing {e.args[0]!r}") from e
        except (TypeError, ValueError) as e:
            raise ModelSpaceError(f"Invalid model parameters: {e}") from e

    @staticmethod
    def create_named(name: str, lambda_min: float = 1e-3) -> ModelSpace:
        key = name.lower()
        if key not in ModelFactory.NAMED:
            raise ModelSpaceError(f"Unknown model name: {name}. "
                                  f"Supported names: {', '.join(sorted(ModelFactory.NAMED))}")
        return ModelFactory.create_model(*ModelFactory.NAMED[key], lambda_min=lambda_min)
