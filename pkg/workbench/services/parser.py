"""Recursive-descent parser for polynomials over QQ and rational functions in QQ(t).

    expr   := ['-'] term (('+' | '-') term)*
    term   := atom ('*' atom | '/' atom)*        division only in rational mode
    atom   := int ['/' posint] | var ['^' nat] | '(' expr ')' ['^' nat]

A literal ``3/4`` is always a rational coefficient. Errors carry the offset of
the offending character.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Sequence

from workbench.algebra.polynomials import Polynomial, constant, polynomial_ring
from workbench.algebra.ratfunc import RationalFunction
from workbench.core.errors import ParseError

_NUMBER = re.compile(r"\d+")
_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


@dataclass
class Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        for kind, pattern in (("num", _NUMBER), ("name", _NAME)):
            match = pattern.match(text, pos)
            if match:
                tokens.append(Token(kind, match.group(), pos))
                pos = match.end()
                break
        else:
            symbol = text[pos]
            if symbol not in "+-*/^()":
                raise ParseError(f"unexpected character {symbol!r}", pos, text)
            tokens.append(Token(symbol, symbol, pos))
            pos += 1
    tokens.append(Token("end", "", len(text.rstrip())))
    return tokens


class _Parser:
    def __init__(
        self,
        text: str,
        variables: Dict[str, object],
        scalar: Callable[[Fraction], object],
        divide: bool,
    ):
        self.text = text
        self.variables = variables
        self.scalar = scalar
        self.divide = divide
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def expect(self, kind: str) -> Token:
        if self.current.kind != kind:
            raise ParseError(f"expected {kind!r}", self.current.position, self.text)
        return self.advance()

    def error(self, message: str, token: Token = None):
        token = token or self.current
        raise ParseError(message, token.position, self.text)

    def parse(self):
        if self.current.kind == "end":
            self.error("empty input")
        value = self.expr()
        if self.current.kind != "end":
            self.error(f"unexpected {self.current.text!r}")
        return value

    def expr(self):
        negate = False
        if self.current.kind == "-":
            self.advance()
            negate = True
        value = self.term()
        if negate:
            value = -value
        while self.current.kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.atom()
        while self.current.kind in ("*", "/"):
            op = self.advance()
            if op.kind == "*":
                value = value * self.atom()
                continue
            if not self.divide:
                self.error("malformed rational", op)
            start = self.current
            divisor = self.atom()
            if not divisor:
                self.error("division by zero", start)
            value = value / divisor
        return value

    def exponent(self) -> int:
        if self.current.kind != "^":
            return 1
        self.advance()
        if self.current.kind != "num":
            self.error("expected a natural exponent")
        return int(self.advance().text)

    def atom(self):
        token = self.current
        if token.kind == "num":
            self.advance()
            value = Fraction(int(token.text))
            if (
                self.current.kind == "/"
                and self.tokens[self.index + 1].kind == "num"
            ):
                slash = self.advance()
                denominator = int(self.advance().text)
                if denominator == 0:
                    self.error("malformed rational: zero denominator", slash)
                value = value / denominator
            elif self.current.kind == "/" and not self.divide:
                self.error("malformed rational", self.tokens[self.index + 1])
            return self.scalar(value)
        if token.kind == "name":
            self.advance()
            if token.text not in self.variables:
                self.error(f"unknown variable {token.text!r}", token)
            return self.variables[token.text] ** self.exponent()
        if token.kind == "(":
            self.advance()
            value = self.expr()
            self.expect(")")
            return value ** self.exponent()
        if token.kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected {token.text!r}")


def parse_polynomial(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse text into QQ[variables]"""
    ring = polynomial_ring(tuple(variables))
    names = dict(zip(variables, ring.gens))
    return _Parser(text, names, lambda c: constant(ring, c), divide=False).parse()


def parse_rational_function(text: str, variable: str = "t") -> RationalFunction:
    """Parse text into QQ(t); '/' may divide by any nonzero factor"""
    t = RationalFunction.t()
    value = _Parser(text, {variable: t}, RationalFunction.constant, divide=True).parse()
    if not isinstance(value, RationalFunction):
        value = RationalFunction.constant(value)
    return value
