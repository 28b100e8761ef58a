"""
Polynomial text parser.

Grammar: integers, x, y, i, + - * / ^ (or **), parentheses and implicit
multiplication ("2x y" is 2·x·y). Exponents must be constant non-negative
integers; division only by nonzero constants.
"""

from dataclasses import dataclass
from typing import List

from .algebra import BivariatePoly, gaussian, rational_parts
from .errors import PolyParseError

MAX_EXPONENT = 1000

_INFIX_POWER = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_IMPLICIT_POWER = 20
_PREFIX_POWER = 30


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op" or "end"
    text: str
    position: int

    def starts_atom(self) -> bool:
        return self.kind in ("num", "name") or self.text == "("


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
        elif ch.isdigit():
            start = pos
            while pos < len(text) and text[pos].isdigit():
                pos += 1
            if pos < len(text) and text[pos] == ".":
                raise PolyParseError("decimal literal; write rationals as p/q", pos, text)
            tokens.append(Token("num", text[start:pos], start))
        elif ch in "xyi":
            tokens.append(Token("name", ch, pos))
            pos += 1
        elif text.startswith("**", pos):
            tokens.append(Token("op", "^", pos))
            pos += 2
        elif ch in "+-*/^()":
            tokens.append(Token("op", ch, pos))
            pos += 1
        else:
            raise PolyParseError(f"unexpected character {ch!r}", pos, text)
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    """Top-down operator precedence parser producing exact polynomials."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    def peek(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def error(self, message: str, token: Token) -> PolyParseError:
        return PolyParseError(message, token.position, self.text)

    def left_power(self, token: Token) -> int:
        if token.kind == "op" and token.text in _INFIX_POWER:
            return _INFIX_POWER[token.text]
        if token.starts_atom():
            return _IMPLICIT_POWER
        return 0

    def parse(self) -> BivariatePoly:
        result = self.expression(0)
        token = self.peek()
        if token.kind != "end":
            raise self.error(f"unexpected {token.text!r}", token)
        return result

    def expression(self, right_power: int) -> BivariatePoly:
        left = self.prefix(self.advance())
        while right_power < self.left_power(self.peek()):
            token = self.peek()
            if token.starts_atom():
                left = left * self.expression(_IMPLICIT_POWER)
            else:
                self.advance()
                left = self.infix(token, left)
        return left

    def prefix(self, token: Token) -> BivariatePoly:
        if token.kind == "num":
            return BivariatePoly.constant(int(token.text))
        if token.kind == "name":
            if token.text == "x":
                return BivariatePoly.x()
            if token.text == "y":
                return BivariatePoly.y()
            return BivariatePoly.constant(gaussian(0, 1))
        if token.text == "(":
            inner = self.expression(0)
            closing = self.advance()
            if closing.text != ")":
                raise self.error("expected ')'", closing)
            return inner
        if token.text == "-":
            return -self.expression(_PREFIX_POWER)
        if token.text == "+":
            return self.expression(_PREFIX_POWER)
        if token.kind == "end":
            raise self.error("unexpected end of input", token)
        raise self.error(f"unexpected {token.text!r}", token)

    def infix(self, token: Token, left: BivariatePoly) -> BivariatePoly:
        if token.text == "+":
            return left + self.expression(10)
        if token.text == "-":
            return left - self.expression(10)
        if token.text == "*":
            return left * self.expression(20)
        if token.text == "/":
            divisor_token = self.peek()
            divisor = self.expression(20)
            if not divisor.is_constant:
                raise self.error("division by a non-constant polynomial", divisor_token)
            if divisor.is_zero:
                raise self.error("division by zero", divisor_token)
            return left * BivariatePoly.constant(1 / divisor.coefficient(0, 0))
        # "^" is right-associative
        exponent_token = self.peek()
        exponent = self.expression(39)
        return left ** self.exponent_value(exponent, exponent_token)

    def exponent_value(self, exponent: BivariatePoly, token: Token) -> int:
        if not exponent.is_constant:
            raise self.error("exponent must be a constant", token)
        re, im = rational_parts(exponent.coefficient(0, 0))
        if im != 0 or re.denominator != 1:
            raise self.error("exponent must be an integer", token)
        if re < 0:
            raise self.error("negative exponent", token)
        if re > MAX_EXPONENT:
            raise self.error(f"exponent above {MAX_EXPONENT}", token)
        return int(re)


def poly_parse(text: str) -> BivariatePoly:
    """
    Parse polynomial text into an exact BivariatePoly.

    Raises:
        PolyParseError: syntax error, negative exponent or division by a
            non-constant, with the offending position
    """
    return _Parser(text).parse()
