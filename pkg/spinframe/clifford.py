"""
Two-Dimensional Spinor Algebra

Clifford multiplication by tangent vectors, the real and complex volume
elements, the splitting into half spinors and the Hermitian product on the
spinor bundle of an oriented surface, in the fixed reference representation

    gamma(e1) = ((0, i), (i, 0)),  gamma(e2) = ((0, 1), (-1, 0)),
    omega = gamma(e1) gamma(e2) = diag(-i, i),  omega2 = i omega = diag(1, -1).

Every function works on single values and on whole grids: spinor arrays have
a trailing axis of length 2 (complex), tangent vector arrays a trailing axis
of length 2 (real) holding components in the oriented orthonormal frame
(E1, E2). The Spinor and TangentVec2 wrappers are accepted wherever an array
is.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

GAMMA1 = np.array([[0, 1j], [1j, 0]], dtype=complex)
GAMMA2 = np.array([[0, 1], [-1, 0]], dtype=complex)
OMEGA = GAMMA1 @ GAMMA2
OMEGA2 = 1j * OMEGA
IDENTITY = np.eye(2, dtype=complex)

GridPoint = Optional[Tuple[int, int]]


@dataclass(eq=False)
class Spinor:
    """
    Value (or grid of values) of a section of the spinor bundle.

    Attributes:
        components: Complex array with trailing axis (c1, c2)
        point: Grid point the value belongs to, when known
    """

    components: np.ndarray
    point: GridPoint = None

    def __post_init__(self):
        self.components = np.asarray(self.components, dtype=complex)
        if self.components.shape[-1:] != (2,):
            raise ValueError(f"Spinor needs a trailing axis of length 2, got {self.components.shape}")

    @classmethod
    def from_seed(cls, seed: Sequence[float]) -> "Spinor":
        """Build a spinor from [re1, im1, re2, im2]."""
        if len(seed) != 4:
            raise ValueError(f"Seed needs 4 real numbers, got {len(seed)}")
        re1, im1, re2, im2 = (float(s) for s in seed)
        return cls(np.array([re1 + 1j * im1, re2 + 1j * im2]))

    @classmethod
    def zeros(cls, shape: Tuple[int, ...] = ()) -> "Spinor":
        return cls(np.zeros(shape + (2,), dtype=complex))

    def norm2(self) -> np.ndarray:
        return norm2(self.components)

    def norm(self) -> np.ndarray:
        return np.sqrt(self.norm2())

    def split(self) -> Tuple["Spinor", "Spinor"]:
        plus, minus = split(self.components)
        return Spinor(plus, self.point), Spinor(minus, self.point)

    def bar(self) -> "Spinor":
        return Spinor(bar(self.components), self.point)

    def to_seed(self):
        c1, c2 = self.components.reshape(-1, 2)[0]
        return [c1.real, c1.imag, c2.real, c2.imag]

    def allclose(self, other: Union["Spinor", np.ndarray], atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.components, _spinor_array(other), atol=atol, rtol=0.0))

    def __add__(self, other):
        return Spinor(self.components + _spinor_array(other), self.point)

    def __sub__(self, other):
        return Spinor(self.components - _spinor_array(other), self.point)

    def __neg__(self):
        return Spinor(-self.components, self.point)

    def __mul__(self, scalar):
        return Spinor(self.components * np.asarray(scalar)[..., None], self.point)

    __rmul__ = __mul__


@dataclass(eq=False)
class TangentVec2:
    """
    Tangent vector (or grid of them) in the oriented orthonormal frame.

    Attributes:
        components: Real array with trailing axis (a1, a2)
        point: Grid point of the frame the components refer to
    """

    components: np.ndarray
    point: GridPoint = None

    def __post_init__(self):
        self.components = np.asarray(self.components, dtype=float)
        if self.components.shape[-1:] != (2,):
            raise ValueError(f"TangentVec2 needs a trailing axis of length 2, got "
                             f"{self.components.shape}")

    def norm2(self) -> np.ndarray:
        return np.sum(self.components ** 2, axis=-1)

    def dot(self, other: "TangentVec2") -> np.ndarray:
        return np.sum(self.components * _vector_array(other), axis=-1)


def _spinor_array(phi) -> np.ndarray:
    if isinstance(phi, Spinor):
        return phi.components
    return np.asarray(phi, dtype=complex)


def _vector_array(X) -> np.ndarray:
    if isinstance(X, TangentVec2):
        return X.components
    return np.asarray(X, dtype=float)


def _check_same_point(X, phi) -> None:
    x_point = getattr(X, "point", None)
    phi_point = getattr(phi, "point", None)
    if x_point is not None and phi_point is not None and x_point != phi_point:
        raise ValueError(f"Vector at {x_point} cannot act on spinor at {phi_point}")


def _wrap_like(template, components: np.ndarray):
    if isinstance(template, Spinor):
        return Spinor(components, template.point)
    return components


def apply(matrix: np.ndarray, phi) -> np.ndarray:
    """Apply a (grid of) 2x2 complex matrices to a (grid of) spinors."""
    return np.einsum("...ij,...j->...i", matrix, _spinor_array(phi))


def gamma_matrix(X) -> np.ndarray:
    """Matrix of Clifford multiplication by X, shape (..., 2, 2)."""
    x = _vector_array(X)
    return x[..., 0, None, None] * GAMMA1 + x[..., 1, None, None] * GAMMA2


def clifford_mul(X, phi):
    """
    Clifford multiplication X . phi.

    Args:
        X: Tangent vector(s) in the orthonormal frame
        phi: Spinor(s) at the same point(s)

    Returns:
        Spinor of the same kind as phi
    """
    _check_same_point(X, phi)
    x = _vector_array(X)
    p = _spinor_array(phi)
    a1, a2 = x[..., 0], x[..., 1]
    out = np.stack([(1j * a1 + a2) * p[..., 1], (1j * a1 - a2) * p[..., 0]], axis=-1)
    return _wrap_like(phi, out)


def omega_mul(phi):
    """Action of the real volume element e1 . e2."""
    p = _spinor_array(phi)
    return _wrap_like(phi, np.stack([-1j * p[..., 0], 1j * p[..., 1]], axis=-1))


def omega2_mul(phi):
    """Action of the complex volume element i e1 . e2, eigenvalues +1 and -1."""
    p = _spinor_array(phi)
    return _wrap_like(phi, np.stack([p[..., 0], -p[..., 1]], axis=-1))


def split(phi):
    """Project onto the +1 and -1 eigenspaces of omega2."""
    p = _spinor_array(phi)
    plus = np.stack([p[..., 0], np.zeros_like(p[..., 1])], axis=-1)
    minus = np.stack([np.zeros_like(p[..., 0]), p[..., 1]], axis=-1)
    return _wrap_like(phi, plus), _wrap_like(phi, minus)


def bar(phi):
    """Reflected spinor omega2 . phi = phi+ - phi-."""
    return omega2_mul(phi)


def herm(phi, psi) -> np.ndarray:
    """Hermitian product, linear in the first slot."""
    return np.sum(_spinor_array(phi) * np.conj(_spinor_array(psi)), axis=-1)


def re_herm(phi, psi) -> np.ndarray:
    return np.real(herm(phi, psi))


def norm2(phi) -> np.ndarray:
    p = _spinor_array(phi)
    return np.sum(p.real ** 2 + p.imag ** 2, axis=-1)
