"""Closed-form scalar expressions over chart coordinates.

A deliberately small language: constants, variables x1..xN, the four
arithmetic operations, integer powers and sin/cos/exp/ln.  Integer-only
exponents keep symbolic differentiation total, which is what makes exact
second and third metric derivatives possible downstream.

Grammar (^ binds tighter than unary minus, which binds tighter than * and /):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' integer)?
    base   := number | ident | func '(' expr ')' | '(' expr ')'
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ParseError, StructuralError

FUNCTIONS = ("sin", "cos", "exp", "ln")


class Expr:
    """Base class for expression nodes; instances are immutable."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_string(self)


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    index: int  # zero-based; renders as x{index+1}


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class Func(Expr):
    name: str
    argument: Expr


# ---------------------------------------------------------------------------
# smart constructors: constant folding and 0/1 identities, nothing more

def _is_const(e: Expr, v: float | None = None) -> bool:
    return isinstance(e, Const) and (v is None or e.value == v)


def add(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return Const(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0) and not _is_const(b, 0.0):
        return Const(0.0)
    if _is_const(b, 1.0):
        return a
    if _is_const(a) and _is_const(b) and b.value != 0.0:
        return Const(a.value / b.value)
    return Div(a, b)


def pow_(base: Expr, exponent: int) -> Expr:
    if exponent == 0:
        return Const(1.0)
    if exponent == 1:
        return base
    if _is_const(base) and (base.value != 0.0 or exponent > 0):
        return Const(base.value**exponent)
    return Pow(base, exponent)


def neg(a: Expr) -> Expr:
    if _is_const(a):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


# ---------------------------------------------------------------------------
# parsing

_OPS = set("+-*/^()")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _OPS:
            tokens.append(("op", c, i))
            i += 1
            continue
        if c.isdigit() or c == ".":
            j = i
            seen_dot = False
            while j < len(text) and (text[j].isdigit() or text[j] == "."):
                if text[j] == ".":
                    if seen_dot:
                        raise ParseError("malformed number", j)
                    seen_dot = True
                j += 1
            if j < len(text) and text[j] in "eE":
                k = j + 1
                if k < len(text) and text[k] in "+-":
                    k += 1
                if k >= len(text) or not text[k].isdigit():
                    raise ParseError("malformed exponent in number", j)
                while k < len(text) and text[k].isdigit():
                    k += 1
                j = k
            tokens.append(("num", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, dim: int):
        self.tokens = tokens
        self.pos = 0
        self.dim = dim

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, val, at = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", at)
        return self.advance()

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                rhs = self.parse_term()
                node = Add(node, rhs) if val == "+" else Sub(node, rhs)
            else:
                return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                rhs = self.parse_factor()
                node = Mul(node, rhs) if val == "*" else Div(node, rhs)
            else:
                return node

    def parse_factor(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            return Neg(self.parse_factor())
        node = self.parse_base()
        kind, val, at = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            node = Pow(node, self.parse_integer())
        return node

    def parse_integer(self) -> int:
        sign = 1
        kind, val, at = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            sign = -1
        kind, val, at = self.advance()
        if kind != "num":
            raise ParseError("expected an integer exponent", at)
        if any(ch in val for ch in ".eE"):
            raise ParseError("exponent must be an integer", at)
        return sign * int(val)

    def parse_base(self) -> Expr:
        kind, val, at = self.advance()
        if kind == "num":
            return Const(float(val))
        if kind == "ident":
            if val in FUNCTIONS:
                self.expect_op("(")
                arg = self.parse_expr()
                self.expect_op(")")
                return Func(val, arg)
            if val.startswith("x") and val[1:].isdigit():
                index = int(val[1:])
                if index < 1 or index > self.dim:
                    raise ParseError(
                        f"variable {val} outside dimension {self.dim}", at
                    )
                return Var(index - 1)
            raise ParseError(f"unknown identifier {val!r}", at)
        if kind == "op" and val == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        raise ParseError(f"unexpected token {val!r}" if val else "unexpected end of input", at)


def parse(text: str, dim: int) -> Expr:
    """Parse expression text with variables x1..x{dim}."""
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    parser = _Parser(_tokenize(text), dim)
    node = parser.parse_expr()
    kind, val, at = parser.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {val!r}", at)
    return node


# ---------------------------------------------------------------------------
# evaluation

def evaluate(e: Expr, point) -> float:
    """Evaluate at a coordinate vector; singular operations raise DomainError."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        if e.index >= len(point):
            raise StructuralError(
                f"expression uses x{e.index + 1} but point has length {len(point)}"
            )
        return float(point[e.index])
    if isinstance(e, Add):
        return evaluate(e.left, point) + evaluate(e.right, point)
    if isinstance(e, Sub):
        return evaluate(e.left, point) - evaluate(e.right, point)
    if isinstance(e, Mul):
        return evaluate(e.left, point) * evaluate(e.right, point)
    if isinstance(e, Div):
        denom = evaluate(e.right, point)
        if denom == 0.0:
            raise DomainError("division by zero", to_string(e))
        return evaluate(e.left, point) / denom
    if isinstance(e, Pow):
        base = evaluate(e.base, point)
        if base == 0.0 and e.exponent < 0:
            raise DomainError("zero raised to a negative power", to_string(e))
        return base**e.exponent
    if isinstance(e, Neg):
        return -evaluate(e.operand, point)
    if isinstance(e, Func):
        arg = evaluate(e.argument, point)
        if e.name == "sin":
            return math.sin(arg)
        if e.name == "cos":
            return math.cos(arg)
        if e.name == "exp":
            try:
                return math.exp(arg)
            except OverflowError:
                raise DomainError("overflow in exp", to_string(e)) from None
        if e.name == "ln":
            if arg <= 0.0:
                raise DomainError("ln of a non-positive value", to_string(e))
            return math.log(arg)
    raise StructuralError(f"unknown node {type(e).__name__}")


# ---------------------------------------------------------------------------
# differentiation

def differentiate(e: Expr, var: int) -> Expr:
    """Exact derivative with respect to x{var+1}; nests to any order."""
    if isinstance(e, Const):
        return Const(0.0)
    if isinstance(e, Var):
        return Const(1.0 if e.index == var else 0.0)
    if isinstance(e, Add):
        return add(differentiate(e.left, var), differentiate(e.right, var))
    if isinstance(e, Sub):
        return sub(differentiate(e.left, var), differentiate(e.right, var))
    if isinstance(e, Mul):
        return add(
            mul(differentiate(e.left, var), e.right),
            mul(e.left, differentiate(e.right, var)),
        )
    if isinstance(e, Div):
        num = sub(
            mul(differentiate(e.left, var), e.right),
            mul(e.left, differentiate(e.right, var)),
        )
        return div(num, pow_(e.right, 2))
    if isinstance(e, Pow):
        inner = differentiate(e.base, var)
        return mul(mul(Const(float(e.exponent)), pow_(e.base, e.exponent - 1)), inner)
    if isinstance(e, Neg):
        return neg(differentiate(e.operand, var))
    if isinstance(e, Func):
        inner = differentiate(e.argument, var)
        if e.name == "sin":
            return mul(Func("cos", e.argument), inner)
        if e.name == "cos":
            return neg(mul(Func("sin", e.argument), inner))
        if e.name == "exp":
            return mul(Func("exp", e.argument), inner)
        if e.name == "ln":
            return div(inner, e.argument)
    raise StructuralError(f"unknown node {type(e).__name__}")


# ---------------------------------------------------------------------------
# printing

_PREC_ATOM = 6
_PREC_POW = 5
_PREC_NEG = 4
_PREC_MUL = 3
_PREC_ADD = 2


def _precedence(e: Expr) -> int:
    if isinstance(e, (Var, Func)):
        return _PREC_ATOM
    if isinstance(e, Const):
        return _PREC_NEG if e.value < 0 else _PREC_ATOM
    if isinstance(e, Pow):
        return _PREC_POW
    if isinstance(e, Neg):
        return _PREC_NEG
    if isinstance(e, (Mul, Div)):
        return _PREC_MUL
    return _PREC_ADD


def _wrap(e: Expr, minimum: int) -> str:
    s = to_string(e)
    return f"({s})" if _precedence(e) < minimum else s


def to_string(e: Expr) -> str:
    """Render to text that reparses to an equivalent expression."""
    if isinstance(e, Const):
        return repr(e.value) if e.value >= 0 else f"-{repr(-e.value)}"
    if isinstance(e, Var):
        return f"x{e.index + 1}"
    if isinstance(e, Add):
        return f"{_wrap(e.left, _PREC_ADD)} + {_wrap(e.right, _PREC_ADD + 1)}"
    if isinstance(e, Sub):
        return f"{_wrap(e.left, _PREC_ADD)} - {_wrap(e.right, _PREC_ADD + 1)}"
    if isinstance(e, Mul):
        return f"{_wrap(e.left, _PREC_MUL)}*{_wrap(e.right, _PREC_MUL + 1)}"
    if isinstance(e, Div):
        return f"{_wrap(e.left, _PREC_MUL)}/{_wrap(e.right, _PREC_MUL + 1)}"
    if isinstance(e, Pow):
        return f"{_wrap(e.base, _PREC_ATOM)}^{e.exponent}"
    if isinstance(e, Neg):
        return f"-{_wrap(e.operand, _PREC_NEG)}"
    if isinstance(e, Func):
        return f"{e.name}({to_string(e.argument)})"
    raise StructuralError(f"unknown node {type(e).__name__}")
