"""Small expression language for the smooth weight factor ``h(x)``.

Grammar (highest binding first)::

    atom    := number | 'x' | 'exp' '(' sum ')' | '(' sum ')'
    power   := atom ['^' unary]          # right associative
    unary   := '-' unary | power
    product := unary (('*' | '/') unary)*
    sum     := product (('+' | '-') product)*

Expressions evaluate elementwise on numpy arrays as well as on floats.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "WeightExpr",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Exp",
    "ExprSyntaxError",
    "UnknownIdentifierError",
    "parse_weight_expr",
    "format_expr",
]


class ExprSyntaxError(ValueError):
    """Raised on malformed expression text; ``offset`` is a UTF-8 byte offset."""

    def __init__(self, message: str, text: str, char_index: int):
        self.offset = len(text[:char_index].encode("utf-8"))
        self.text = text
        super().__init__(f"{message} at byte offset {self.offset}")


class UnknownIdentifierError(ExprSyntaxError):
    def __init__(self, name: str, text: str, char_index: int):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", text, char_index)


@dataclass(frozen=True)
class Const:
    value: float

    def __call__(self, x):
        if np.ndim(x):
            return np.full(np.shape(x), float(self.value))
        return np.float64(self.value)


@dataclass(frozen=True)
class Var:
    def __call__(self, x):
        return np.asarray(x, dtype=float) if np.ndim(x) else np.float64(x)


@dataclass(frozen=True)
class Neg:
    arg: "WeightExpr"

    def __call__(self, x):
        return -self.arg(x)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "WeightExpr"
    right: "WeightExpr"

    def __call__(self, x):
        lhs = self.left(x)
        rhs = self.right(x)
        if self.op == "+":
            return lhs + rhs
        if self.op == "-":
            return lhs - rhs
        if self.op == "*":
            return lhs * rhs
        if self.op == "/":
            return lhs / rhs
        return np.power(lhs, rhs)


@dataclass(frozen=True)
class Exp:
    arg: "WeightExpr"

    def __call__(self, x):
        return np.exp(self.arg(x))


WeightExpr = Union[Const, Var, Neg, BinOp, Exp]


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", text, bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


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

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value:
            found = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", self.text, pos)

    def parse(self) -> WeightExpr:
        node = self.sum()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {val!r}", self.text, pos)
        return node

    def sum(self) -> WeightExpr:
        node = self.product()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.product())
        return node

    def product(self) -> WeightExpr:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> WeightExpr:
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> WeightExpr:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> WeightExpr:
        kind, val, pos = self.take()
        if kind == "num":
            return Const(float(val))
        if kind == "name":
            if val == "x":
                return Var()
            if val == "exp":
                self.expect("(")
                arg = self.sum()
                self.expect(")")
                return Exp(arg)
            raise UnknownIdentifierError(val, self.text, pos)
        if kind == "op" and val == "(":
            node = self.sum()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"expected operand, found {found}", self.text, pos)


def parse_weight_expr(text: str) -> WeightExpr:
    """Parse ``text`` into an expression tree.

    Raises ExprSyntaxError (with byte offset) on malformed input and
    UnknownIdentifierError for names other than ``x`` and ``exp``.
    """
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", text or "", 0)
    return _Parser(text).parse()


def format_expr(node: WeightExpr) -> str:
    """Fully parenthesized text that parses back to an equivalent tree."""
    if isinstance(node, Const):
        text = repr(float(node.value))
        return f"({text})" if node.value < 0 or text.startswith("-") else text
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        return f"(-{format_expr(node.arg)})"
    if isinstance(node, Exp):
        return f"exp({format_expr(node.arg)})"
    if isinstance(node, BinOp):
        return f"({format_expr(node.left)}{node.op}{format_expr(node.right)})"
    raise TypeError(f"not an expression node: {node!r}")
