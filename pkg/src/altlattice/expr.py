"""Constant-expression grammar for closed-form right-hand sides.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := NUMBER | 'pi' | ('sqrt' | 'log') '(' expr ')' | '(' expr ')'

Implicit multiplication is rejected: ``2(5+sqrt(5))`` must be written
``2*(5+sqrt(5))``.  Exponents must be rational constants.  The ASCII
hyphen and the Unicode minus sign are both accepted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

import mpmath
from mpmath import mpf

from altlattice.numerics import DomainError, PrecisionContext


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}\n  {text}\n  {' ' * pos}^")


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Num | Pi | Neg | BinOp | Call

FUNCTIONS = ("sqrt", "log")

_TOKEN = re.compile(r"(\d+(?:\.\d*)?|\.\d+)|([A-Za-z_]\w*)|(\S)")


def _tokenize(text: str):
    text = text.replace("\u2212", "-")
    tokens = []
    for m in _TOKEN.finditer(text):
        start = m.start()
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExprSyntaxError(f"unexpected character {ch!r}", text, start)
            tokens.append(("op", ch, start))
    tokens.append(("end", "", len(text)))
    return tokens, text


class _Parser:
    def __init__(self, text: str):
        self.tokens, self.text = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise ExprSyntaxError(message, self.text, tok[2])

    def expect(self, value):
        tok = self.peek()
        if tok[1] != value or tok[0] == "num":
            if value == ")" and (tok[1] == "(" or tok[0] in ("num", "name")):
                self.error("implicit multiplication is not allowed; insert '*'")
            self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}")
        return self.take()

    def parse(self) -> Node:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            if tok[1] == "(" or tok[0] in ("num", "name"):
                self.error("implicit multiplication is not allowed; insert '*'")
            self.error(f"unexpected {tok[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            tok = self.take()
            exponent = self.unary()
            if _rational_value(exponent) is None:
                self.error("exponent must be a rational constant", tok)
            return BinOp("^", base, exponent)
        return base

    def atom(self):
        tok = self.peek()
        kind, value, _ = tok
        if kind == "num":
            self.take()
            return Num(Fraction(Decimal(value)))
        if kind == "name":
            self.take()
            if value == "pi":
                return Pi()
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            self.error(f"unknown name {value!r}", tok)
        if kind == "op" and value == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        self.error(f"unexpected {value or 'end of input'!r}")


def _rational_value(node) -> Fraction | None:
    """Exact value of a node built only from literals and + - * / ^, else None."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Neg):
        inner = _rational_value(node.operand)
        return None if inner is None else -inner
    if isinstance(node, BinOp):
        left, right = _rational_value(node.left), _rational_value(node.right)
        if left is None or right is None:
            return None
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            return None if right == 0 else left / right
        if node.op == "^" and right.denominator == 1 and not (left == 0 and right < 0):
            return left ** int(right)
    return None


@dataclass(frozen=True)
class ConstExpr:
    """A parsed constant expression together with its source text."""

    tree: Node
    text: str

    def evaluate(self, ctx: PrecisionContext) -> mpf:
        with ctx.workdps():
            value = _eval(self.tree)
            if not mpmath.isfinite(value):
                raise DomainError(f"expression {self.text!r} is not finite")
            return value

    def __str__(self):
        return to_text(self.tree)


def parse_const_expr(text: str) -> ConstExpr:
    return ConstExpr(_Parser(text).parse(), text)


def _pow(base, exponent: Fraction):
    p, q = exponent.numerator, exponent.denominator
    if base < 0:
        if q % 2 == 0:
            raise DomainError("even root of a negative base")
        magnitude = mpmath.root(-base, q) ** p
        return -magnitude if p % 2 else magnitude
    if base == 0 and p < 0:
        raise DomainError("zero raised to a negative power")
    if q == 1:
        return base ** p
    return mpmath.root(base, q) ** p


def _eval(node):
    if isinstance(node, Num):
        return mpf(node.value.numerator) / node.value.denominator
    if isinstance(node, Pi):
        return +mpmath.pi
    if isinstance(node, Neg):
        return -_eval(node.operand)
    if isinstance(node, Call):
        arg = _eval(node.arg)
        if node.func == "sqrt":
            if arg < 0:
                raise DomainError("sqrt of a negative number")
            return mpmath.sqrt(arg)
        if arg <= 0:
            raise DomainError("log of a non-positive number")
        return mpmath.log(arg)
    left = _eval(node.left)
    if node.op == "^":
        return _pow(left, _rational_value(node.right))
    right = _eval(node.right)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if right == 0:
        raise DomainError("division by zero")
    return left / right


def _num_text(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    # only terminating decimals come out of the parser
    places = 0
    while (value * 10 ** places).denominator != 1:
        places += 1
    scaled = str(abs((value * 10 ** places).numerator)).rjust(places + 1, "0")
    sign = "-" if value < 0 else ""
    return f"{sign}{scaled[:-places]}.{scaled[-places:]}"


def to_text(node) -> str:
    """Fully parenthesised rendering that parses back to the same tree."""
    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Pi):
        return "pi"
    if isinstance(node, Neg):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
