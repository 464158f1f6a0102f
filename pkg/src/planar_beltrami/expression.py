"""
Parser for textual alpha(y) expressions.

Grammar (standard precedence, ``^`` right-associative, unary minus binds
looser than ``^`` so ``-y^2`` is ``-(y^2)``)::

    expression := term (("+" | "-") term)*
    term       := factor (("*" | "/") factor)*
    factor     := "-" factor | power
    power      := atom ("^" factor)?
    atom       := NUMBER | "y" | FUNCTION "(" expression ")" | "(" expression ")"

The parse tree is built directly as a sympy expression, which supplies the
symbolic derivatives and the numpy-vectorized evaluators.
"""

import re
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import sympy as sp

from .errors import ParseError

Y = sp.Symbol("y", real=True)

FUNCTIONS: dict[str, Callable[[sp.Expr], sp.Expr]] = {
    "sin": sp.sin,
    "cos": sp.cos,
    "tan": sp.tan,
    "exp": sp.exp,
    "log": sp.log,
    "sqrt": sp.sqrt,
    "abs": sp.Abs,
    "asin": sp.asin,
}

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> list[Token]:
    """Split an expression into number, name and operator tokens."""
    tokens = []
    position = 0
    while position < len(text):
        if text[position:].strip() == "":
            break
        match = _TOKEN.match(text, position)
        if match is None or match.end() == position:
            offset = len(text[position:]) - len(text[position:].lstrip())
            raise ParseError(f"Unexpected character {text[position + offset]!r}", position + offset)
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append(Token(kind, match.group(kind), start))
        position = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser over a token list."""

    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _expect(self, text: str) -> None:
        if self.current.text != text:
            found = self.current.text or "end of input"
            raise ParseError(f"Expected {text!r}, found {found!r}", self.current.position)
        self._advance()

    def parse(self) -> sp.Expr:
        expr = self._expression()
        if self.current.kind != "end":
            raise ParseError(f"Unexpected token {self.current.text!r}", self.current.position)
        return expr

    def _expression(self) -> sp.Expr:
        expr = self._term()
        while self.current.text in ("+", "-"):
            op = self._advance().text
            rhs = self._term()
            expr = expr + rhs if op == "+" else expr - rhs
        return expr

    def _term(self) -> sp.Expr:
        expr = self._factor()
        while self.current.text in ("*", "/"):
            op = self._advance().text
            rhs = self._factor()
            expr = expr * rhs if op == "*" else expr / rhs
        return expr

    def _factor(self) -> sp.Expr:
        if self.current.text == "-":
            self._advance()
            return -self._factor()
        return self._power()

    def _power(self) -> sp.Expr:
        base = self._atom()
        if self.current.text == "^":
            self._advance()
            return base ** self._factor()
        return base

    def _atom(self) -> sp.Expr:
        token = self.current
        if token.kind == "number":
            self._advance()
            return sp.Rational(token.text)
        if token.kind == "name":
            self._advance()
            if token.text == "y":
                return Y
            if token.text in FUNCTIONS:
                self._expect("(")
                argument = self._expression()
                self._expect(")")
                return FUNCTIONS[token.text](argument)
            raise ParseError(f"Unknown name {token.text!r}", token.position)
        if token.text == "(":
            self._advance()
            expr = self._expression()
            self._expect(")")
            return expr
        found = token.text or "end of input"
        raise ParseError(f"Expected a number, 'y', a function or '(', found {found!r}", token.position)


def _vectorized(expr: sp.Expr) -> Callable[[Union[float, np.ndarray]], np.ndarray]:
    compiled = sp.lambdify(Y, expr, modules="numpy")

    def evaluate(y: Union[float, np.ndarray]) -> np.ndarray:
        y_arr = np.asarray(y, dtype=float)
        with np.errstate(all="ignore"):
            values = np.asarray(compiled(y_arr), dtype=float)
        if values.shape != y_arr.shape:
            values = np.broadcast_to(values, y_arr.shape).copy()
        return values

    return evaluate


@dataclass(frozen=True)
class ParsedExpression:
    """A parsed expression in y with its symbolic derivatives."""

    text: str
    expr: sp.Expr

    def derivative(self, order: int = 1) -> sp.Expr:
        return sp.diff(self.expr, Y, order) if order else self.expr

    def compile(self, order: int = 0) -> Callable[[Union[float, np.ndarray]], np.ndarray]:
        """numpy evaluator of the expression (order 0) or of its derivative."""
        return _vectorized(self.derivative(order))


def parse_expression(text: str) -> ParsedExpression:
    """
    Parse text into a sympy expression in y.

    Raises:
        ParseError: With the character position of the first offending token
    """
    if not text or not text.strip():
        raise ParseError("Empty expression", 0)
    return ParsedExpression(text=text, expr=_Parser(text).parse())
