"""A small arithmetic expression language for f(x, y), u0(x) and v0(x).

Grammar, loosest binding first::

    expr  := term (("+" | "-") term)*
    term  := unary (("*" | "/") unary)*
    unary := "-" unary | power
    power := atom ("^" unary)?          # right-associative
    atom  := number | name | name "(" expr ")" | "(" expr ")"
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ExprEvalError, ExprSyntaxError, UnknownIdentifierError

VARIABLES = ("x", "y", "alpha")
FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, Bin, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(src: str):
    toks = []
    pos = 0
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos >= len(src):
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        kind, v, pos = self.peek()
        if v != value or kind == "end":
            what = "end of input" if kind == "end" else repr(v)
            raise ExprSyntaxError(f"expected {value!r}, found {what}", pos)
        self.take()

    def parse(self):
        e = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {v!r}", pos)
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            e = Bin(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            e = Bin(op, e, self.unary())
        return e

    def unary(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return Bin("^", base, self.unary())
        return base

    def atom(self):
        kind, v, pos = self.take()
        if kind == "num":
            return Num(float(v))
        if kind == "name":
            if v in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(v, arg)
            if v in VARIABLES:
                return Var(v)
            raise UnknownIdentifierError(v, pos)
        if kind == "op" and v == "(":
            e = self.expr()
            self.expect(")")
            return e
        what = "end of input" if kind == "end" else repr(v)
        raise ExprSyntaxError(f"expected an operand, found {what}", pos)


def parse_expr(src: str) -> Expr:
    if not isinstance(src, str) or not src.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(src).parse()


def to_source(e: Expr) -> str:
    """Fully parenthesized source that parses back to the same tree."""
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_source(e.arg)})"
    if isinstance(e, Call):
        return f"{e.fn}({to_source(e.arg)})"
    return f"({to_source(e.left)} {e.op} {to_source(e.right)})"


def variables(e: Expr) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Num):
        return set()
    if isinstance(e, (Neg, Call)):
        return variables(e.arg)
    return variables(e.left) | variables(e.right)


def _fail(tag, msg):
    raise ExprEvalError(tag, msg)


def _power(a, b):
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    if np.any((a == 0) & (b < 0)):
        _fail("zero-negative-power", "0 raised to a negative power")
    if np.any((a < 0) & (b != np.round(b))):
        _fail("negative-base", "negative base with non-integer exponent")
    return np.power(a, b)


def evaluate(e: Expr, env: dict):
    """Evaluate ``e`` with numpy broadcasting over the values in ``env``."""
    with np.errstate(all="ignore"):
        out = _eval(e, env)
    out = np.asarray(out, dtype=float)
    if not np.all(np.isfinite(out)):
        _fail("overflow", "expression value is not finite")
    return out


def _eval(e, env):
    if isinstance(e, Num):
        return np.float64(e.value)
    if isinstance(e, Var):
        if e.name not in env:
            raise UnknownIdentifierError(e.name, -1)
        return np.asarray(env[e.name], dtype=float)
    if isinstance(e, Neg):
        return -_eval(e.arg, env)
    if isinstance(e, Call):
        a = np.asarray(_eval(e.arg, env), dtype=float)
        if e.fn == "log":
            if np.any(a <= 0):
                _fail("log-domain", "log of a nonpositive value")
            return np.log(a)
        if e.fn == "sqrt":
            if np.any(a < 0):
                _fail("sqrt-domain", "sqrt of a negative value")
            return np.sqrt(a)
        return {"exp": np.exp, "sin": np.sin, "cos": np.cos}[e.fn](a)
    a = _eval(e.left, env)
    b = _eval(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if e.op == "/":
        if np.any(np.asarray(b) == 0):
            _fail("division-by-zero", "division by zero")
        return a / b
    return _power(a, b)


def compile_field(e: Expr, alpha: float):
    """f(x, y) as a vectorized callable."""

    def f(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return evaluate(e, {"x": x, "y": y, "alpha": alpha}) * np.ones(np.broadcast(x, y).shape)

    return f


def compile_profile(e: Expr, alpha: float):
    """u(x) as a vectorized callable."""

    def u(x):
        x = np.asarray(x, dtype=float)
        return evaluate(e, {"x": x, "alpha": alpha}) * np.ones_like(x)

    return u
