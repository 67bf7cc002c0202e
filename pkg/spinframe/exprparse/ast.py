"""
Expression Tree

Immutable syntax tree for surface parametrizations and its canonical
printer. Printing emits the minimal parentheses needed for the parser to
rebuild the same tree, so print(parse(print(e))) == print(e).
"""

from dataclasses import dataclass
from typing import Tuple

VARIABLES = ("u", "v")
CONSTANTS = ("pi",)
FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "tanh", "atan")


class Expr:
    """Base class of all expression nodes."""

    precedence = 5

    def children(self) -> Tuple["Expr", ...]:
        return ()

    def __str__(self) -> str:
        return to_source(self)


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Const(Expr):
    name: str


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr

    def children(self) -> Tuple[Expr, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    precedence = 3

    def children(self) -> Tuple[Expr, ...]:
        return (self.operand,)


@dataclass(frozen=True)
class BinOp(Expr):
    left: Expr
    right: Expr

    symbol = "?"

    def children(self) -> Tuple[Expr, ...]:
        return (self.left, self.right)


@dataclass(frozen=True)
class Add(BinOp):
    symbol = "+"
    precedence = 1


@dataclass(frozen=True)
class Sub(BinOp):
    symbol = "-"
    precedence = 1


@dataclass(frozen=True)
class Mul(BinOp):
    symbol = "*"
    precedence = 2


@dataclass(frozen=True)
class Div(BinOp):
    symbol = "/"
    precedence = 2


@dataclass(frozen=True)
class Pow(BinOp):
    symbol = "^"
    precedence = 4


BINARY_NODES = {"+": Add, "-": Sub, "*": Mul, "/": Div, "^": Pow}


def depth(expr: Expr) -> int:
    """Return the height of the tree (a leaf has depth 1)."""
    kids = expr.children()
    return 1 + max((depth(k) for k in kids), default=0)


def _format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _wrap(expr: Expr, needs_parens: bool) -> str:
    text = to_source(expr)
    return f"({text})" if needs_parens else text


def to_source(expr: Expr) -> str:
    """
    Print an expression in canonical form.

    Args:
        expr: Expression tree

    Returns:
        Source text that parses back to a structurally identical tree
    """
    if isinstance(expr, Num):
        return _format_number(expr.value)
    if isinstance(expr, (Var, Const)):
        return expr.name
    if isinstance(expr, Call):
        return f"{expr.func}({to_source(expr.arg)})"
    if isinstance(expr, Neg):
        return "-" + _wrap(expr.operand, expr.operand.precedence < Neg.precedence)
    if isinstance(expr, Pow):
        # Right associative; the exponent slot accepts a unary minus.
        left = _wrap(expr.left, expr.left.precedence <= Pow.precedence)
        right = _wrap(expr.right, expr.right.precedence < Neg.precedence)
        return f"{left}^{right}"
    if isinstance(expr, BinOp):
        left = _wrap(expr.left, expr.left.precedence < expr.precedence)
        right = _wrap(expr.right, expr.right.precedence <= expr.precedence)
        if isinstance(expr, (Add, Sub)):
            return f"{left} {expr.symbol} {right}"
        return f"{left}{expr.symbol}{right}"
    raise TypeError(f"Unknown expression node: {type(expr).__name__}")
