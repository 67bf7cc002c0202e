"""
Expression Lexer

Splits parametrization text into tokens. Offsets are byte offsets into the
UTF-8 encoding of the source so that error positions stay meaningful for
non-ASCII input such as the unicode operator spellings.
"""

import re
from dataclasses import dataclass
from typing import List

from spinframe.exceptions import ExpressionSyntaxError

NUMBER = "NUMBER"
IDENT = "IDENT"
OP = "OP"
LPAREN = "LPAREN"
RPAREN = "RPAREN"
COMMA = "COMMA"
EOF = "EOF"

_NUMBER_REGEXP = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_IDENT_REGEXP = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")

# Unicode spellings are normalised to their ASCII operator.
_OPERATORS = {
    "+": "+",
    "-": "-",
    "−": "-",
    "*": "*",
    "×": "*",
    "/": "/",
    "÷": "/",
    "^": "^",
}


@dataclass(frozen=True)
class Token:
    """A lexical token with its byte offset in the source."""

    kind: str
    text: str
    offset: int


def tokenize(source: str) -> List[Token]:
    """
    Tokenize an expression.

    Args:
        source: Expression text

    Returns:
        List of tokens terminated by an EOF token

    Raises:
        ExpressionSyntaxError: On a character that starts no token
    """
    tokens: List[Token] = []
    pos = 0
    byte_pos = 0
    length = len(source)

    while pos < length:
        char = source[pos]
        if char.isspace():
            pos += 1
            byte_pos += len(char.encode("utf-8"))
            continue

        start = byte_pos
        if char.isdigit() or (char == "." and pos + 1 < length and source[pos + 1].isdigit()):
            match = _NUMBER_REGEXP.match(source, pos)
            text = match.group(0)
            tokens.append(Token(NUMBER, text, start))
        elif char.isalpha() or char == "_":
            match = _IDENT_REGEXP.match(source, pos)
            text = match.group(0)
            tokens.append(Token(IDENT, text, start))
        elif char in _OPERATORS:
            text = char
            tokens.append(Token(OP, _OPERATORS[char], start))
        elif char == "(":
            text = char
            tokens.append(Token(LPAREN, char, start))
        elif char == ")":
            text = char
            tokens.append(Token(RPAREN, char, start))
        elif char == ",":
            text = char
            tokens.append(Token(COMMA, char, start))
        else:
            raise ExpressionSyntaxError(f"unexpected character {char!r}", start, source)

        pos += len(text)
        byte_pos += len(text.encode("utf-8"))

    tokens.append(Token(EOF, "", byte_pos))
    return tokens
