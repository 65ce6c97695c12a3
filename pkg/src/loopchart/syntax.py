"""Star expressions, stacked star expressions, and their concrete syntax.

Concrete syntax for plain expressions::

    e ::= 0 | 1 | name | e + e | e . e | e* | ( e )

Postfix ``*`` binds tightest, then ``.``, then ``+``; both binary operators
associate to the left. Stacked expressions are only ever printed; the stacked
product is written `` * `` (with spaces) so it cannot be confused with the
postfix iteration star.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

__all__ = [
    "Zero", "One", "Act", "Plus", "Dot", "Star",
    "Lift", "DotC", "StarC",
    "StarExpr", "StackedExpr", "Expr",
    "ParseError", "ReservedLiteralError",
    "parse_star_expr", "render", "star_height", "project",
    "lift", "dotc", "starc", "size", "sort_key",
]

ACTION_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")


class _Node:
    """Shared ordering/hash plumbing for all expression nodes."""

    __slots__ = ()

    def __lt__(self, other):
        if not isinstance(other, _Node):
            return NotImplemented
        return sort_key(self) < sort_key(other)

    def __le__(self, other):
        if not isinstance(other, _Node):
            return NotImplemented
        return sort_key(self) <= sort_key(other)

    def __gt__(self, other):
        if not isinstance(other, _Node):
            return NotImplemented
        return sort_key(self) > sort_key(other)

    def __ge__(self, other):
        if not isinstance(other, _Node):
            return NotImplemented
        return sort_key(self) >= sort_key(other)

    def __str__(self):
        return render(self)


# Plain star expressions.

@dataclass(frozen=True, eq=True, repr=False)
class Zero(_Node):
    def __repr__(self):
        return "Zero()"


@dataclass(frozen=True, eq=True, repr=False)
class One(_Node):
    def __repr__(self):
        return "One()"


@dataclass(frozen=True, eq=True)
class Act(_Node):
    symbol: str

    def __post_init__(self):
        if self.symbol in ("0", "1"):
            raise ReservedLiteralError(f"{self.symbol!r} is a reserved literal, not an action")
        if not ACTION_RE.match(self.symbol):
            raise ValueError(f"invalid action name {self.symbol!r}")


@dataclass(frozen=True, eq=True)
class Plus(_Node):
    left: StarExpr
    right: StarExpr


@dataclass(frozen=True, eq=True)
class Dot(_Node):
    left: StarExpr
    right: StarExpr


@dataclass(frozen=True, eq=True)
class Star(_Node):
    body: StarExpr


StarExpr = Union[Zero, One, Act, Plus, Dot, Star]
_PLAIN = (Zero, One, Act, Plus, Dot, Star)


# Stacked star expressions.

@dataclass(frozen=True, eq=True)
class Lift(_Node):
    expr: StarExpr


@dataclass(frozen=True, eq=True)
class DotC(_Node):
    left: StackedExpr
    right: StarExpr


@dataclass(frozen=True, eq=True)
class StarC(_Node):
    left: StackedExpr
    right: Star

    def __post_init__(self):
        if not isinstance(self.right, Star):
            raise TypeError("right operand of a stacked product must be an iteration")


StackedExpr = Union[Lift, DotC, StarC]
Expr = Union[StarExpr, StackedExpr]


def lift(e: StarExpr) -> Lift:
    return Lift(e)


def dotc(left: StackedExpr, right: StarExpr) -> StackedExpr:
    """Stacked concatenation; collapses onto the plain product when `left` is plain.

    ``E . e`` with ``E`` a plain star expression *is* the star expression
    ``E . e``, so the result stays a single `Lift` to keep vertex identity
    unambiguous.
    """
    if isinstance(left, Lift):
        return Lift(Dot(left.expr, right))
    return DotC(left, right)


def starc(left: StackedExpr, right: Star) -> StarC:
    return StarC(left, right)


# Ordering: case tag in declaration order, then children, then symbol.

_TAGS = {Zero: 0, One: 1, Act: 2, Plus: 3, Dot: 4, Star: 5, Lift: 6, DotC: 7, StarC: 8}


def sort_key(e: Expr) -> tuple:
    t = type(e)
    if t is Zero or t is One:
        return (_TAGS[t],)
    if t is Act:
        return (2, e.symbol)
    if t is Star:
        return (5, sort_key(e.body))
    if t is Lift:
        return (6, sort_key(e.expr))
    return (_TAGS[t], sort_key(e.left), sort_key(e.right))


def size(e: Expr) -> int:
    """Number of syntax-tree nodes (`Lift` wrappers are not counted)."""
    t = type(e)
    if t in (Zero, One, Act):
        return 1
    if t is Star:
        return 1 + size(e.body)
    if t is Lift:
        return size(e.expr)
    return 1 + size(e.left) + size(e.right)


def star_height(e: Expr) -> int:
    t = type(e)
    if t in (Zero, One, Act):
        return 0
    if t is Star:
        return 1 + star_height(e.body)
    if t is Lift:
        return star_height(e.expr)
    return max(star_height(e.left), star_height(e.right))


def project(e: StackedExpr) -> StarExpr:
    """Map a stacked expression to a plain one by reading `` * `` as ``.``."""
    t = type(e)
    if t is Lift:
        return e.expr
    if t is DotC or t is StarC:
        return Dot(project(e.left), e.right)
    if t in _PLAIN:
        return e
    raise TypeError(f"not an expression: {e!r}")


# Rendering.

_PREC_PLUS, _PREC_DOT, _PREC_ATOM = 0, 1, 2


def _prec(e: StarExpr) -> int:
    if isinstance(e, Plus):
        return _PREC_PLUS
    if isinstance(e, Dot):
        return _PREC_DOT
    return _PREC_ATOM


def _render_plain(e: StarExpr) -> str:
    t = type(e)
    if t is Zero:
        return "0"
    if t is One:
        return "1"
    if t is Act:
        return e.symbol
    if t is Star:
        inner = _render_plain(e.body)
        return (inner if _prec(e.body) == _PREC_ATOM else f"({inner})") + "*"
    if t is Plus:
        left = _render_plain(e.left)
        right = _render_plain(e.right)
        if isinstance(e.right, Plus):
            right = f"({right})"
        return f"{left}+{right}"
    if t is Dot:
        left = _render_plain(e.left)
        right = _render_plain(e.right)
        if isinstance(e.left, Plus):
            left = f"({left})"
        if _prec(e.right) != _PREC_ATOM:
            right = f"({right})"
        return f"{left}.{right}"
    raise TypeError(f"not a star expression: {e!r}")


def _render_stacked_left(E: StackedExpr) -> str:
    if isinstance(E, Lift):
        text = _render_plain(E.expr)
        return f"({text})" if isinstance(E.expr, Plus) else text
    return f"({_render_stacked(E)})"


def _render_stacked(E: StackedExpr) -> str:
    t = type(E)
    if t is Lift:
        return _render_plain(E.expr)
    if t is DotC:
        right = _render_plain(E.right)
        if _prec(E.right) != _PREC_ATOM:
            right = f"({right})"
        return f"{_render_stacked_left(E.left)}.{right}"
    if t is StarC:
        return f"{_render_stacked_left(E.left)} * {_render_plain(E.right)}"
    raise TypeError(f"not a stacked expression: {E!r}")


def render(e: Expr) -> str:
    """Canonical text with minimal parentheses."""
    if isinstance(e, (Lift, DotC, StarC)):
        return _render_stacked(e)
    return _render_plain(e)


# Parsing.

class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ReservedLiteralError(ValueError):
    pass


_TOKEN_RE = re.compile(r"\s*(?:(?P<name>[a-zA-Z][a-zA-Z0-9_]*)|(?P<num>[0-9]+)|(?P<op>[+.*()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        tokens.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.take()
        if text != value or kind == "eof":
            raise ParseError(f"expected {value!r}, found {text or 'end of input'!r}", pos)

    def parse(self) -> StarExpr:
        e = self.sum()
        kind, text, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected {text!r}", pos)
        return e

    def sum(self) -> StarExpr:
        e = self.product()
        while self.peek()[1] == "+" and self.peek()[0] == "op":
            self.take()
            e = Plus(e, self.product())
        return e

    def product(self) -> StarExpr:
        e = self.postfix()
        while self.peek()[1] == "." and self.peek()[0] == "op":
            self.take()
            e = Dot(e, self.postfix())
        return e

    def postfix(self) -> StarExpr:
        e = self.atom()
        while self.peek()[1] == "*" and self.peek()[0] == "op":
            self.take()
            e = Star(e)
        return e

    def atom(self) -> StarExpr:
        kind, text, pos = self.take()
        if kind == "num":
            if text == "0":
                return Zero()
            if text == "1":
                return One()
            raise ParseError(f"unknown literal {text!r}", pos)
        if kind == "name":
            return Act(text)
        if kind == "op" and text == "(":
            e = self.sum()
            self.expect(")")
            return e
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos)


def parse_star_expr(text: str) -> StarExpr:
    """Parse the concrete syntax described in the module docstring.

    >>> parse_star_expr("a+b.c")
    Plus(left=Act(symbol='a'), right=Dot(left=Act(symbol='b'), right=Act(symbol='c')))
    """
    return _Parser(text).parse()
