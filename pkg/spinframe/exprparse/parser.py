"""
Expression Parser

Recursive-descent parser for the parametrization language documented in
docs/expression_grammar.md. Precedence from loosest to tightest is
+ -, then * /, then unary minus, then ^ (right associative).
"""

import logging
from typing import List

from spinframe.exceptions import ArityError, ExpressionSyntaxError, UnknownIdentifierError
from spinframe.exprparse import lexer
from spinframe.exprparse.ast import (
    BINARY_NODES,
    CONSTANTS,
    FUNCTIONS,
    VARIABLES,
    Call,
    Const,
    Expr,
    Neg,
    Num,
    Var,
)
from spinframe.exprparse.lexer import Token

logger = logging.getLogger(__name__)


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens: List[Token] = lexer.tokenize(source)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def error(self, message: str, token: Token) -> ExpressionSyntaxError:
        return ExpressionSyntaxError(message, token.offset, self.source)

    def expect(self, kind: str, what: str) -> Token:
        token = self.current
        if token.kind != kind:
            found = token.text or "end of input"
            raise self.error(f"expected {what}, found {found!r}", token)
        return self.advance()

    def parse(self) -> Expr:
        if self.current.kind == lexer.EOF:
            raise self.error("empty expression", self.current)
        expr = self.expression()
        if self.current.kind != lexer.EOF:
            raise self.error(f"unexpected {self.current.text!r}", self.current)
        return expr

    def expression(self) -> Expr:
        node = self.term()
        while self.current.kind == lexer.OP and self.current.text in "+-":
            op = self.advance().text
            node = BINARY_NODES[op](node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.current.kind == lexer.OP and self.current.text in "*/":
            op = self.advance().text
            node = BINARY_NODES[op](node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.current.kind == lexer.OP and self.current.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.current.kind == lexer.OP and self.current.text == "^":
            self.advance()
            return BINARY_NODES["^"](base, self.unary())
        return base

    def atom(self) -> Expr:
        token = self.current
        if token.kind == lexer.NUMBER:
            self.advance()
            return Num(float(token.text))
        if token.kind == lexer.LPAREN:
            self.advance()
            inner = self.expression()
            self.expect(lexer.RPAREN, "')'")
            return inner
        if token.kind == lexer.IDENT:
            return self.identifier()
        found = token.text or "end of input"
        raise self.error(f"unexpected {found!r}", token)

    def identifier(self) -> Expr:
        token = self.advance()
        name = token.text
        if self.current.kind == lexer.LPAREN:
            if name not in FUNCTIONS:
                raise UnknownIdentifierError(name, token.offset, self.source)
            self.advance()
            if self.current.kind == lexer.RPAREN:
                raise ArityError(f"{name} expects 1 argument, got 0", token.offset, self.source)
            arg = self.expression()
            if self.current.kind == lexer.COMMA:
                count = 1
                while self.current.kind == lexer.COMMA:
                    self.advance()
                    self.expression()
                    count += 1
                raise ArityError(f"{name} expects 1 argument, got {count}", token.offset,
                                 self.source)
            self.expect(lexer.RPAREN, "')'")
            return Call(name, arg)
        if name in VARIABLES:
            return Var(name)
        if name in CONSTANTS:
            return Const(name)
        if name in FUNCTIONS:
            raise ArityError(f"{name} expects 1 argument, got 0", token.offset, self.source)
        raise UnknownIdentifierError(name, token.offset, self.source)


def parse(source: str) -> Expr:
    """
    Parse an expression.

    Args:
        source: Expression text in the variables u and v

    Returns:
        Expression tree

    Raises:
        ExpressionSyntaxError: Malformed input, with the byte offset
        UnknownIdentifierError: Identifier other than u, v, pi or a known function
        ArityError: Function applied to the wrong number of arguments
    """
    expr = _Parser(source).parse()
    logger.debug(f"Parsed expression {source!r}")
    return expr
