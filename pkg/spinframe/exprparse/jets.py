"""
Second-Order Jets

Forward-mode differentiation in the two parameters (u, v) truncated at
order two. A Jet2 carries the value, both first partials and the three
second partials; the mixed partial has a single slot so it is symmetric by
construction.

The module-level functions (sin, cos, ...) accept jets, plain floats and
numpy arrays, so chart formulas can be written once and evaluated either
exactly along a parametrized surface or vectorized over a grid.
"""

import math
from typing import Tuple, Union

import numpy as np

from spinframe.exceptions import EvaluationDomainError

Number = Union[int, float]


class Jet2:
    """
    Truncated Taylor expansion of order two in (u, v).
    """

    __slots__ = ("value", "du", "dv", "duu", "duv", "dvv")

    def __init__(self, value: Number, du: Number = 0.0, dv: Number = 0.0,
                 duu: Number = 0.0, duv: Number = 0.0, dvv: Number = 0.0):
        self.value = float(value)
        self.du = float(du)
        self.dv = float(dv)
        self.duu = float(duu)
        self.duv = float(duv)
        self.dvv = float(dvv)

    @classmethod
    def constant(cls, value: Number) -> "Jet2":
        return cls(value)

    @classmethod
    def variable(cls, name: str, value: Number) -> "Jet2":
        """Seed jet for one of the parameters u or v."""
        if name == "u":
            return cls(value, du=1.0)
        if name == "v":
            return cls(value, dv=1.0)
        raise ValueError(f"Unknown jet variable: {name}")

    def partials(self) -> Tuple[float, float, float, float, float, float]:
        return (self.value, self.du, self.dv, self.duu, self.duv, self.dvv)

    def __repr__(self) -> str:
        return (f"Jet2(value={self.value!r}, du={self.du!r}, dv={self.dv!r}, "
                f"duu={self.duu!r}, duv={self.duv!r}, dvv={self.dvv!r})")

    # ---------- arithmetic ----------
    @staticmethod
    def _coerce(x: Union["Jet2", Number]) -> "Jet2":
        return x if isinstance(x, Jet2) else Jet2(x)

    def __add__(self, other: Union["Jet2", Number]) -> "Jet2":
        o = Jet2._coerce(other)
        return Jet2(self.value + o.value, self.du + o.du, self.dv + o.dv,
                    self.duu + o.duu, self.duv + o.duv, self.dvv + o.dvv)

    __radd__ = __add__

    def __neg__(self) -> "Jet2":
        return Jet2(-self.value, -self.du, -self.dv, -self.duu, -self.duv, -self.dvv)

    def __sub__(self, other: Union["Jet2", Number]) -> "Jet2":
        return self + (-Jet2._coerce(other))

    def __rsub__(self, other: Union["Jet2", Number]) -> "Jet2":
        return Jet2._coerce(other) + (-self)

    def __mul__(self, other: Union["Jet2", Number]) -> "Jet2":
        if not isinstance(other, Jet2):
            c = float(other)
            return Jet2(self.value * c, self.du * c, self.dv * c,
                        self.duu * c, self.duv * c, self.dvv * c)
        f, g = self, other
        return Jet2(
            f.value * g.value,
            f.du * g.value + f.value * g.du,
            f.dv * g.value + f.value * g.dv,
            f.duu * g.value + 2.0 * f.du * g.du + f.value * g.duu,
            f.duv * g.value + f.du * g.dv + f.dv * g.du + f.value * g.duv,
            f.dvv * g.value + 2.0 * f.dv * g.dv + f.value * g.dvv,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        x = self.value
        if x == 0.0:
            raise EvaluationDomainError("division by zero")
        return self._compose(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))

    def __truediv__(self, other: Union["Jet2", Number]) -> "Jet2":
        if not isinstance(other, Jet2):
            if float(other) == 0.0:
                raise EvaluationDomainError("division by zero")
            return self * (1.0 / float(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other: Union["Jet2", Number]) -> "Jet2":
        return Jet2._coerce(other) * self.reciprocal()

    def __pow__(self, power: Union["Jet2", Number]) -> "Jet2":
        if isinstance(power, Jet2):
            return (power * self.log()).exp()
        p = float(power)
        if p.is_integer():
            return self.int_power(int(p))
        if self.value <= 0.0:
            raise EvaluationDomainError(f"non-integer power of non-positive base {self.value}")
        x = self.value
        return self._compose(x ** p, p * x ** (p - 1.0), p * (p - 1.0) * x ** (p - 2.0))

    def int_power(self, n: int) -> "Jet2":
        """Integer power; small exponents use repeated multiplication."""
        if n < 0:
            return self.int_power(-n).reciprocal()
        if n <= 8:
            result = Jet2(1.0)
            for _ in range(n):
                result = result * self
            return result
        x = self.value
        return self._compose(x ** n, n * x ** (n - 1), n * (n - 1) * x ** (n - 2))

    # ---------- composition ----------
    def _compose(self, d0: float, d1: float, d2: float) -> "Jet2":
        """Chain rule for a scalar function with derivatives d0, d1, d2 at the value."""
        return Jet2(
            d0,
            d1 * self.du,
            d1 * self.dv,
            d2 * self.du * self.du + d1 * self.duu,
            d2 * self.du * self.dv + d1 * self.duv,
            d2 * self.dv * self.dv + d1 * self.dvv,
        )

    # ---------- unary ----------
    def sin(self) -> "Jet2":
        s, c = math.sin(self.value), math.cos(self.value)
        return self._compose(s, c, -s)

    def cos(self) -> "Jet2":
        s, c = math.sin(self.value), math.cos(self.value)
        return self._compose(c, -s, -c)

    def tan(self) -> "Jet2":
        c = math.cos(self.value)
        if c == 0.0:
            raise EvaluationDomainError(f"tan pole at {self.value}")
        t = math.tan(self.value)
        sec2 = 1.0 + t * t
        return self._compose(t, sec2, 2.0 * sec2 * t)

    def exp(self) -> "Jet2":
        e = math.exp(self.value)
        return self._compose(e, e, e)

    def log(self) -> "Jet2":
        x = self.value
        if x <= 0.0:
            raise EvaluationDomainError(f"log domain error: input must be > 0, got {x}")
        return self._compose(math.log(x), 1.0 / x, -1.0 / (x * x))

    def sqrt(self) -> "Jet2":
        x = self.value
        if x <= 0.0:
            raise EvaluationDomainError(f"sqrt domain error: input must be > 0, got {x}")
        r = math.sqrt(x)
        return self._compose(r, 0.5 / r, -0.25 / (r * x))

    def sinh(self) -> "Jet2":
        s, c = math.sinh(self.value), math.cosh(self.value)
        return self._compose(s, c, s)

    def cosh(self) -> "Jet2":
        s, c = math.sinh(self.value), math.cosh(self.value)
        return self._compose(c, s, c)

    def tanh(self) -> "Jet2":
        t = math.tanh(self.value)
        d1 = 1.0 - t * t
        return self._compose(t, d1, -2.0 * t * d1)

    def atan(self) -> "Jet2":
        x = self.value
        d1 = 1.0 / (1.0 + x * x)
        return self._compose(math.atan(x), d1, -2.0 * x * d1 * d1)


def _dispatch(name: str, numpy_func):
    def func(x):
        if isinstance(x, Jet2):
            return getattr(x, name)()
        return numpy_func(x)

    func.__name__ = name
    func.__doc__ = f"{name} of a jet, float or numpy array."
    return func


sin = _dispatch("sin", np.sin)
cos = _dispatch("cos", np.cos)
tan = _dispatch("tan", np.tan)
exp = _dispatch("exp", np.exp)
log = _dispatch("log", np.log)
sqrt = _dispatch("sqrt", np.sqrt)
sinh = _dispatch("sinh", np.sinh)
cosh = _dispatch("cosh", np.cosh)
tanh = _dispatch("tanh", np.tanh)
atan = _dispatch("atan", np.arctan)
