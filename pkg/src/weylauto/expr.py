"""Text syntax for polynomials, operators, symbols and 1-forms.

Grammar (``^`` binds tightest, unary minus binds tighter than ``*``)::

    expr  := term (("+" | "-") term)*
    term  := unary ("*" unary)*
    unary := "-" unary | power
    power := atom ("^" INT)?
    atom  := INT ("/" INT)? | NAME | "(" expr ")"
    NAME  := "x" INT | "xi" INT | "d" INT        (1-based indices)

In operator expressions ``*`` is composition, so ``d1*x1`` normalizes to
``x1*d1 + 1``.  In symbol and polynomial expressions ``*`` is commutative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .classical import PolySymbol
from .ratpoly import DimensionError, RationalPoly
from .weyl import DiffOp

KINDS = ("operator", "symbol", "poly", "oneform")


class ExprSyntaxError(SyntaxError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


class KindError(ValueError):
    """A variable that is not allowed in the requested kind of expression."""


# -- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Fraction  # non-negative; negation is a Neg node


@dataclass(frozen=True)
class Var:
    family: str  # "x", "xi" or "d"
    index: int  # 1-based


@dataclass(frozen=True)
class BinOp:
    op: str  # "+", "-" or "*"
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Num, Var, BinOp, Neg, Pow]


# -- tokens / parser ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>xi\d+|x\d+|d\d+)|(?P<op>[-+*^/(),]))")


def _tokenize(text: str) -> list:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[start]!r}", start, text)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            raise ExprSyntaxError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2], self.text)
        return tok

    def error(self, tok, what="unexpected"):
        found = tok[1] or "end of input"
        return ExprSyntaxError(f"{what} {found!r}", tok[2], self.text)

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] == "*":
            self.take()
            node = BinOp("*", node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "int":
                raise self.error(tok, "exponent must be a non-negative integer, found")
            return Pow(base, int(tok[1]))
        return base

    def atom(self):
        tok = self.take()
        kind, value, pos = tok
        if kind == "int":
            num = int(value)
            if self.peek()[1] == "/":
                self.take()
                den = self.take()
                if den[0] != "int":
                    raise self.error(den, "denominator must be an integer literal, found")
                if int(den[1]) == 0:
                    raise ExprSyntaxError("zero denominator", den[2], self.text)
                return Num(Fraction(num, int(den[1])))
            return Num(Fraction(num))
        if kind == "name":
            family = "xi" if value.startswith("xi") else value[0]
            index = int(value[len(family):])
            if index < 1:
                raise ExprSyntaxError("variable indices start at 1", pos, self.text)
            return Var(family, index)
        if value == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise self.error(tok)


def parse_ast(text: str) -> Expr:
    p = _Parser(text)
    node = p.expr()
    tok = p.peek()
    if tok[0] != "end":
        raise p.error(tok)
    return node


# -- printer ---------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2}


def _prec(node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    if isinstance(node, Num) and node.value.denominator != 1:
        return 4  # p/q reads as one literal, but wrap it under ^
    return 5


def _wrap(node, cond: bool) -> str:
    s = print_ast(node)
    return f"({s})" if cond else s


def print_ast(node: Expr) -> str:
    """Minimal-parenthesis text; parse_ast(print_ast(e)) == e."""
    if isinstance(node, Num):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(node, Var):
        return f"{node.family}{node.index}"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _prec(node.operand) < 3)
    if isinstance(node, Pow):
        return f"{_wrap(node.base, _prec(node.base) < 5)}^{node.exponent}"
    p = _PREC[node.op]
    left = _wrap(node.left, _prec(node.left) < p)
    right = _wrap(node.right, _prec(node.right) <= p)
    if node.op == "*":
        return f"{left}*{right}"
    return f"{left} {node.op} {right}"


# -- evaluation ----------------------------------------------------------------------


def max_index(node: Expr) -> int:
    if isinstance(node, Var):
        return node.index
    if isinstance(node, Num):
        return 0
    if isinstance(node, (Neg, Pow)):
        return max_index(node.operand if isinstance(node, Neg) else node.base)
    return max(max_index(node.left), max_index(node.right))


_ALLOWED = {"operator": {"x", "d"}, "symbol": {"x", "xi"}, "poly": {"x"}, "oneform": {"x"}}


def _check_kind(node: Expr, kind: str) -> None:
    if isinstance(node, Var):
        if node.family not in _ALLOWED[kind]:
            raise KindError(f"{node.family}{node.index} is not allowed in a {kind} expression")
    elif isinstance(node, BinOp):
        _check_kind(node.left, kind)
        _check_kind(node.right, kind)
    elif isinstance(node, Neg):
        _check_kind(node.operand, kind)
    elif isinstance(node, Pow):
        _check_kind(node.base, kind)


def evaluate(node: Expr, kind: str, dim: int):
    """Value of an AST as a DiffOp (operator), PolySymbol (symbol) or RationalPoly (poly)."""
    if kind == "operator":
        leaf = _op_leaf
    elif kind == "symbol":
        leaf = _symbol_leaf
    elif kind == "poly":
        leaf = _poly_leaf
    else:
        raise ValueError(f"cannot evaluate kind {kind!r}")
    _check_kind(node, kind)
    if max_index(node) > dim:
        raise DimensionError(f"expression uses index {max_index(node)} but dimension is {dim}")

    def ev(e):
        if isinstance(e, (Num, Var)):
            return leaf(e, dim)
        if isinstance(e, Neg):
            return -ev(e.operand)
        if isinstance(e, Pow):
            return ev(e.base) ** e.exponent
        a, b = ev(e.left), ev(e.right)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        return a * b

    return ev(node)


def _op_leaf(e, n):
    if isinstance(e, Num):
        return DiffOp.constant(n, e.value)
    return DiffOp.x(n, e.index - 1) if e.family == "x" else DiffOp.partial(n, e.index - 1)


def _symbol_leaf(e, n):
    if isinstance(e, Num):
        return PolySymbol.constant(n, e.value)
    return PolySymbol.x(n, e.index - 1) if e.family == "x" else PolySymbol.xi(n, e.index - 1)


def _poly_leaf(e, n):
    if isinstance(e, Num):
        return RationalPoly.constant(n, e.value)
    return RationalPoly.variable(n, e.index - 1)


def _split_components(text: str) -> list[str]:
    parts = []
    depth = 0
    start = 0
    for k, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append((start, text[start:k]))
            start = k + 1
    parts.append((start, text[start:]))
    return parts


def parse_expr(text: str, kind: str):
    """Parse to an AST; a 1-form gives a list of ASTs, one per component."""
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if kind == "oneform":
        out = []
        for start, piece in _split_components(text):
            try:
                node = parse_ast(piece)
            except ExprSyntaxError as exc:
                raise ExprSyntaxError(str(exc).rsplit(" at position", 1)[0], start + exc.position, text) from None
            _check_kind(node, kind)
            out.append(node)
        return out
    node = parse_ast(text)
    _check_kind(node, kind)
    return node


def infer_dim(nodes) -> int:
    if not isinstance(nodes, (list, tuple)):
        nodes = [nodes]
    return max([max_index(n) for n in nodes] + [1])


def parse_value(text: str, kind: str, dim: int | None = None):
    """Parse and evaluate.  ``dim`` defaults to the highest index used (at least 1)."""
    from .autos import OneForm

    ast = parse_expr(text, kind)
    if kind == "oneform":
        n = dim if dim is not None else len(ast)
        if len(ast) != n:
            raise DimensionError(f"1-form needs {n} components, got {len(ast)}")
        return OneForm([evaluate(a, "poly", n) for a in ast])
    n = dim if dim is not None else infer_dim(ast)
    return evaluate(ast, kind, n)


def parse_operator(text: str, dim: int | None = None) -> DiffOp:
    return parse_value(text, "operator", dim)


def parse_symbol(text: str, dim: int | None = None) -> PolySymbol:
    return parse_value(text, "symbol", dim)


def parse_poly(text: str, dim: int | None = None) -> RationalPoly:
    return parse_value(text, "poly", dim)


def parse_oneform(text: str, dim: int | None = None):
    return parse_value(text, "oneform", dim)


def format_value(value) -> str:
    """Canonical text for a DiffOp, PolySymbol, RationalPoly or OneForm."""
    from .autos import OneForm
    from .classical import format_symbol
    from .ratpoly import format_poly
    from .weyl import format_op

    if isinstance(value, DiffOp):
        return format_op(value)
    if isinstance(value, PolySymbol):
        return format_symbol(value)
    if isinstance(value, RationalPoly):
        return format_poly(value)
    if isinstance(value, OneForm):
        return ", ".join(format_poly(c) for c in value.components)
    raise TypeError(f"cannot format {type(value).__name__}")
