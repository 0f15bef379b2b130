"""Recursive-descent parser for the expression language.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := number | symbol | func '(' expr ')' | '(' expr ')'
    func   := exp | ln | sin | cos | sqrt

``^`` binds tighter than unary minus and is right-associative, so ``-x^2`` is
``-(x^2)`` and ``2^3^2`` is ``2^(3^2)``.
"""

import re
from dataclasses import dataclass
from typing import List, Optional

from .errors import ExprSyntaxError, UndeclaredSymbolError
from .expr import UNARY_FUNCTIONS, Chart, Expr, const


_TOKEN_PATTERN = re.compile(
    r"""
    (?P<space>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def _byte_offset(source: str, index: int) -> int:
    return len(source[:index].encode("utf-8"))


def tokenize(source: str) -> List[Token]:
    tokens: List[Token] = []
    index = 0
    while index < len(source):
        match = _TOKEN_PATTERN.match(source, index)
        if match is None:
            raise ExprSyntaxError(
                f"Unexpected character {source[index]!r}",
                _byte_offset(source, index),
                source,
            )
        kind = match.lastgroup or ""
        if kind != "space":
            tokens.append(Token(kind, match.group(), _byte_offset(source, index)))
        index = match.end()
    tokens.append(Token("end", "", _byte_offset(source, len(source))))
    return tokens


class _Parser:
    def __init__(self, source: str, chart: Chart):
        self.source = source
        self.chart = chart
        self.tokens = tokenize(source)
        self.position = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.position]

    def _advance(self) -> Token:
        token = self.tokens[self.position]
        self.position += 1
        return token

    def _accept(self, text: str) -> Optional[Token]:
        if self.current.kind == "op" and self.current.text == text:
            return self._advance()
        return None

    def _expect(self, text: str) -> Token:
        token = self._accept(text)
        if token is None:
            found = self.current.text or "end of input"
            raise ExprSyntaxError(
                f"Expected '{text}' but found '{found}'",
                self.current.offset,
                self.source,
            )
        return token

    def parse(self) -> Expr:
        if self.current.kind == "end":
            raise ExprSyntaxError("Empty expression", 0, self.source)
        result = self.expr()
        if self.current.kind != "end":
            raise ExprSyntaxError(
                f"Unexpected '{self.current.text}'", self.current.offset, self.source
            )
        return result

    def expr(self) -> Expr:
        left = self.term()
        while True:
            if self._accept("+"):
                left = Expr("add", (left, self.term()))
            elif self._accept("-"):
                left = Expr("sub", (left, self.term()))
            else:
                return left

    def term(self) -> Expr:
        left = self.unary()
        while True:
            if self._accept("*"):
                left = Expr("mul", (left, self.unary()))
            elif self._accept("/"):
                left = Expr("div", (left, self.unary()))
            else:
                return left

    def unary(self) -> Expr:
        if self._accept("-"):
            return Expr("neg", (self.unary(),))
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self._accept("^"):
            return Expr("pow", (base, self.unary()))
        return base

    def atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self._advance()
            return const(float(token.text))
        if token.kind == "name":
            self._advance()
            if token.text in UNARY_FUNCTIONS:
                self._expect("(")
                argument = self.expr()
                self._expect(")")
                return Expr(token.text, (argument,))
            if not self.chart.declares(token.text):
                raise UndeclaredSymbolError(token.text, token.offset)
            return self.chart.symbol(token.text)
        if self._accept("("):
            inner = self.expr()
            self._expect(")")
            return inner
        found = token.text or "end of input"
        raise ExprSyntaxError(f"Unexpected '{found}'", token.offset, self.source)


def parse(source: str, chart: Chart) -> Expr:
    """Parse ``source`` against ``chart``; every symbol must be declared there."""
    return _Parser(source, chart).parse()
