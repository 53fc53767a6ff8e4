"""Text syntax for observables.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' exponent)?          exponent: optionally signed integer,
                                            possibly parenthesized
    atom   := number ['i'] | 'i' | name | func '(' expr ')' | '(' expr ')'
    func   := sqrt | sin | cos

Names resolve through an environment mapping (phase variables and derived
quantities such as ``z``/``zbar`` or ``w``/``wbar``); anything else becomes a
parameter.  Error positions are 1-based character columns.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping

from . import phase
from .exact import GaussC
from .phase import Observable

FUNCTIONS = {"sqrt": phase.sqrt, "sin": phase.sin, "cos": phase.cos}

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)(i(?![A-Za-z0-9_]))?|([A-Za-z_][A-Za-z0-9_]*)|(.))")


class ExpressionSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.position = position
        self.text = text


def _tokenize(text: str):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(0).strip() == "":
            break
        start = m.start(1) if m.group(1) else m.start(3) if m.group(3) else m.start(4)
        if m.group(1):
            toks.append(("num", (m.group(1), bool(m.group(2))), start + 1))
        elif m.group(3):
            toks.append(("name", m.group(3), start + 1))
        else:
            ch = m.group(4)
            if ch not in "+-*/^(),":
                raise ExpressionSyntaxError(f"unexpected character {ch!r}", start + 1, text)
            toks.append(("op", ch, start + 1))
        pos = m.end()
    toks.append(("end", None, len(text) + 1))
    return toks


class _Parser:
    def __init__(self, text: str, env: Mapping[str, Observable]):
        self.text = text
        self.env = env
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ExpressionSyntaxError(msg, tok[2], self.text)

    def expect(self, ch):
        t = self.take()
        if t[0] != "op" or t[1] != ch:
            self.fail(f"expected {ch!r}", t)

    def parse(self) -> Observable:
        e = self.expr()
        if self.peek()[0] != "end":
            self.fail("unexpected token")
        return e

    def expr(self):
        e = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            r = self.term()
            e = e + r if op == "+" else e - r
        return e

    def term(self):
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            r = self.unary()
            e = e * r if op == "*" else e / r
        return e

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            e = self.unary()
            return -e if t[1] == "-" else e
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return phase.power(base, self.exponent())
        return base

    def exponent(self) -> int:
        paren = False
        if self.peek()[0] == "op" and self.peek()[1] == "(":
            self.take()
            paren = True
        sign = 1
        if self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = -1 if self.take()[1] == "-" else 1
        t = self.take()
        if t[0] != "num" or t[1][1] or not t[1][0].isdigit():
            self.fail("exponent must be an integer literal", t)
        if paren:
            self.expect(")")
        return sign * int(t[1][0])

    def atom(self):
        t = self.take()
        kind, val, _ = t
        if kind == "num":
            digits, imag = val
            q = Fraction(digits)
            return phase.const(GaussC(0, q) if imag else GaussC(q))
        if kind == "name":
            if val == "i":
                return phase.const(GaussC(0, 1))
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return FUNCTIONS[val](arg)
            if val in self.env:
                return self.env[val]
            return phase.param(val)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        self.fail("unexpected token" if kind != "end" else "unexpected end of input", t)


def parse_expression(text: str, env: Mapping[str, Observable] | None = None,
                     space: str | None = None) -> Observable:
    """Parse ``text`` into an :class:`Observable`.

    ``space`` selects a default environment: ``"Euclidean"`` (x, y, px, py,
    z, zbar, M, pplus, pminus) or ``"Sphere"`` (theta, phi, ptheta, pphi and
    the ambient x, y, z, w, wbar, J1, J2, J3).
    """
    if env is None:
        if space in (None, "Euclidean"):
            env = phase.euclidean_environment()
        elif space == "Sphere":
            env = phase.sphere_environment()
        else:
            raise ValueError(f"unknown space {space!r}")
    return _Parser(text, env).parse()


def parse_exact(text: str, params: Mapping[str, GaussC] | None = None) -> GaussC:
    """Evaluate a variable-free expression exactly over Q(i)."""
    e = parse_expression(text, env={})
    return eval_exact(e, params or {})


def eval_exact(e: Observable, params: Mapping[str, GaussC]) -> GaussC:
    op = e.op
    if op == "const":
        return e.data
    if op == "param":
        if e.data not in params:
            raise KeyError(f"unbound parameter {e.data!r}")
        return GaussC.coerce(params[e.data])
    if op == "var":
        raise ValueError(f"phase variable {e.data!r} in an exact coefficient")
    a = [eval_exact(x, params) for x in e.args]
    if op == "add":
        return a[0] + a[1]
    if op == "sub":
        return a[0] - a[1]
    if op == "mul":
        return a[0] * a[1]
    if op == "div":
        return a[0] / a[1]
    if op == "neg":
        return -a[0]
    if op == "pow":
        return a[0] ** e.data
    raise ValueError(f"{op} is not exact over the Gaussian rationals")
