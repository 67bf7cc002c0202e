"""
Tests for the expression lexer, parser and printer.
"""

import pytest

from spinframe.exceptions import ArityError, ExpressionSyntaxError, UnknownIdentifierError
from spinframe.exprparse import depth, eval_values, parse, to_source
from spinframe.exprparse.ast import Call, Neg, Pow
from spinframe.exprparse.lexer import tokenize


def test_tokenize_offsets_are_bytes():
    """Offsets count UTF-8 bytes, so a unicode operator shifts later tokens."""
    tokens = tokenize("u × v")
    assert [t.kind for t in tokens] == ["IDENT", "OP", "IDENT", "EOF"]
    assert tokens[1].text == "*"
    assert tokens[2].offset == 5


def test_tokenize_rejects_stray_character():
    with pytest.raises(ExpressionSyntaxError) as info:
        tokenize("u # v")
    assert info.value.offset == 2


@pytest.mark.parametrize("source, expected", [
    ("u+v*2", "u + v*2"),
    ("(u+v)*2", "(u + v)*2"),
    ("u-(v-1)", "u - (v - 1)"),
    ("u/(v*2)", "u/(v*2)"),
    ("-u^2", "-u^2"),
    ("(-u)^2", "(-u)^2"),
    ("2^3^2", "2^3^2"),
    ("(2^3)^2", "(2^3)^2"),
    ("sin(u)*cos(v)", "sin(u)*cos(v)"),
    ("2.5e-1*pi", "0.25*pi"),
])
def test_canonical_printing(source, expected):
    assert to_source(parse(source)) == expected


@pytest.mark.parametrize("source", [
    "u + v", "-u^-2", "sqrt(1 + u^2)/(2 - v)", "exp(-(u - v)^2)*tanh(u)", "atan(u/(1 + v^2))",
])
def test_printing_is_idempotent(source):
    once = to_source(parse(source))
    assert to_source(parse(once)) == once


def test_unary_minus_binds_looser_than_power():
    expr = parse("-u^2")
    assert isinstance(expr, Neg)
    assert isinstance(expr.operand, Pow)
    assert float(eval_values(expr, 3.0, 0.0)) == -9.0


def test_power_is_right_associative():
    assert float(eval_values(parse("2^3^2"), 0.0, 0.0)) == 512.0


def test_unicode_operators_normalize():
    assert to_source(parse("u × v − 1 ÷ 2")) == "u*v - 1/2"


def test_depth():
    assert depth(parse("u")) == 1
    assert depth(parse("sin(u + v)")) == 3


def test_unclosed_call_reports_end_offset():
    """'sin(u' fails at the end of input."""
    with pytest.raises(ExpressionSyntaxError) as info:
        parse("sin(u")
    assert info.value.offset == 5
    assert info.value.code == "syntax_error"


def test_empty_expression():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse("   ")
    assert info.value.offset == 3


def test_trailing_tokens():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse("u v")
    assert info.value.offset == 2


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as info:
        parse("u + w")
    assert info.value.name == "w"
    assert info.value.offset == 4


def test_unknown_function():
    with pytest.raises(UnknownIdentifierError) as info:
        parse("sec(u)")
    assert info.value.name == "sec"


@pytest.mark.parametrize("source", ["sin()", "sin(u, v)", "cos"])
def test_arity(source):
    with pytest.raises(ArityError):
        parse(source)


def test_call_node():
    expr = parse("log(u)")
    assert isinstance(expr, Call)
    assert expr.func == "log"
