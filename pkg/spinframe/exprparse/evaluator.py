"""
Expression Evaluator

Evaluates expression trees either as second-order jets at a single
parameter point or as plain values over numpy grids.
"""

import math
from typing import Union

import numpy as np

from spinframe.exceptions import EvaluationDomainError
from spinframe.exprparse import jets
from spinframe.exprparse.ast import (
    Add,
    Call,
    Const,
    Div,
    Expr,
    Mul,
    Neg,
    Num,
    Pow,
    Sub,
    Var,
    to_source,
)
from spinframe.exprparse.jets import Jet2

_CONSTANTS = {"pi": math.pi}

# Domain predicates for functions that are not entire.
_DOMAINS = {
    "log": (lambda x: x > 0.0, "log of non-positive value"),
    "sqrt": (lambda x: x > 0.0, "sqrt of non-positive value"),
}

ArrayLike = Union[float, np.ndarray]


def _small_integer(expr: Expr):
    """Return n when expr is a literal integer exponent with |n| <= 8."""
    sign = 1
    if isinstance(expr, Neg):
        sign, expr = -1, expr.operand
    if isinstance(expr, Num) and expr.value.is_integer() and abs(expr.value) <= 8:
        return sign * int(expr.value)
    return None


def eval_jet2(expr: Expr, u: float, v: float) -> Jet2:
    """
    Evaluate an expression with all partials up to order two.

    Args:
        expr: Expression tree
        u: First parameter
        v: Second parameter

    Returns:
        Jet2 holding the value and the exact first and second partials

    Raises:
        EvaluationDomainError: Function evaluated outside its domain; the
            message names the offending subexpression
    """
    return _eval_jet(expr, Jet2.variable("u", u), Jet2.variable("v", v))


def _eval_jet(expr: Expr, ju: Jet2, jv: Jet2) -> Jet2:
    if isinstance(expr, Num):
        return Jet2.constant(expr.value)
    if isinstance(expr, Var):
        return ju if expr.name == "u" else jv
    if isinstance(expr, Const):
        return Jet2.constant(_CONSTANTS[expr.name])
    if isinstance(expr, Neg):
        return -_eval_jet(expr.operand, ju, jv)
    try:
        return _apply_jet(expr, ju, jv)
    except EvaluationDomainError as e:
        # The innermost failing node names itself; outer nodes pass it on.
        if e.expression:
            raise
        raise EvaluationDomainError(e.message, to_source(expr)) from e


def _apply_jet(expr: Expr, ju: Jet2, jv: Jet2) -> Jet2:
    if isinstance(expr, Call):
        return getattr(jets, expr.func)(_eval_jet(expr.arg, ju, jv))
    if isinstance(expr, Pow):
        base = _eval_jet(expr.left, ju, jv)
        exponent = _small_integer(expr.right)
        if exponent is not None:
            return base.int_power(exponent)
        power = _eval_jet(expr.right, ju, jv)
        if power.du == power.dv == power.duu == power.duv == power.dvv == 0.0:
            return base ** power.value
        return base ** power
    left = _eval_jet(expr.left, ju, jv)
    right = _eval_jet(expr.right, ju, jv)
    if isinstance(expr, Add):
        return left + right
    if isinstance(expr, Sub):
        return left - right
    if isinstance(expr, Mul):
        return left * right
    if isinstance(expr, Div):
        return left / right
    raise TypeError(f"Unknown expression node: {type(expr).__name__}")


def eval_values(expr: Expr, u: ArrayLike, v: ArrayLike) -> np.ndarray:
    """
    Evaluate an expression over arrays of parameter values.

    Args:
        expr: Expression tree
        u: Parameter values (any shape broadcastable with v)
        v: Parameter values

    Returns:
        Array of values with the broadcast shape

    Raises:
        EvaluationDomainError: Function evaluated outside its domain
    """
    u_arr, v_arr = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    return np.asarray(_eval_array(expr, u_arr, v_arr), dtype=float) + np.zeros(u_arr.shape)


def _eval_array(expr: Expr, u: np.ndarray, v: np.ndarray):
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Var):
        return u if expr.name == "u" else v
    if isinstance(expr, Const):
        return _CONSTANTS[expr.name]
    if isinstance(expr, Neg):
        return -_eval_array(expr.operand, u, v)
    if isinstance(expr, Call):
        arg = _eval_array(expr.arg, u, v)
        if expr.func in _DOMAINS:
            ok, message = _DOMAINS[expr.func]
            if not np.all(ok(np.asarray(arg))):
                raise EvaluationDomainError(message, to_source(expr))
        return getattr(jets, expr.func)(arg)
    left = _eval_array(expr.left, u, v)
    right = _eval_array(expr.right, u, v)
    if isinstance(expr, Add):
        return left + right
    if isinstance(expr, Sub):
        return left - right
    if isinstance(expr, Mul):
        return left * right
    if isinstance(expr, Div):
        if np.any(np.asarray(right) == 0.0):
            raise EvaluationDomainError("division by zero", to_source(expr))
        return left / right
    if isinstance(expr, Pow):
        if np.ndim(right) == 0 and float(right).is_integer():
            if float(right) < 0 and np.any(np.asarray(left) == 0.0):
                raise EvaluationDomainError("division by zero", to_source(expr))
            return np.power(left, float(right))
        if np.any(np.asarray(left) <= 0.0):
            raise EvaluationDomainError("non-integer power of non-positive base", to_source(expr))
        return np.exp(right * np.log(left))
    raise TypeError(f"Unknown expression node: {type(expr).__name__}")
