"""Text form of polynomials: a small recursive-descent parser and a canonical printer.

Grammar (``^`` takes an integer literal, juxtaposition is not multiplication)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := ('+' | '-') unary | power
    power := atom ('^' INT)?
    atom  := INT | NAME | '(' expr ')'

Division is allowed only by nonzero constants, which is how rational
coefficients such as ``3/2*X`` are written.
"""
from __future__ import annotations

import re
from fractions import Fraction

from arithdeg.multipoly.poly import MultiPoly, VarSet

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


class PolySyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownVariableError(KeyError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown variable {name!r} at offset {offset}")
        self.name = name
        self.offset = offset

    def __str__(self) -> str:
        return self.args[0]


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            toks.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise PolySyntaxError(f"unexpected character {ch!r}", m.start(3))
            toks.append(("op", ch, m.start(3)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, varset: VarSet):
        self.toks = _tokenize(text)
        self.i = 0
        self.vs = varset

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, ch: str):
        kind, val, pos = self.take()
        if kind != "op" or val != ch:
            raise PolySyntaxError(f"expected {ch!r}", pos)

    def parse(self) -> MultiPoly:
        kind, _, pos = self.peek()
        if kind == "end":
            raise PolySyntaxError("empty expression", pos)
        p = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise PolySyntaxError(f"unexpected {val!r}", pos)
        return p

    def expr(self) -> MultiPoly:
        p = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                q = self.term()
                p = p + q if val == "+" else p - q
            else:
                return p

    def term(self) -> MultiPoly:
        p = self.unary()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                q = self.unary()
                if val == "*":
                    p = p * q
                else:
                    if not q.is_constant():
                        raise PolySyntaxError("division by a non-constant", pos)
                    if q.is_zero():
                        raise PolySyntaxError("division by zero", pos)
                    p = p * (1 / Fraction(q.terms[0]))
            else:
                return p

    def unary(self) -> MultiPoly:
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            p = self.unary()
            return -p if val == "-" else p
        return self.power()

    def power(self) -> MultiPoly:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            k2, v2, p2 = self.take()
            if k2 != "int":
                raise PolySyntaxError("exponent must be a nonnegative integer literal", p2)
            return base ** int(v2)
        return base

    def atom(self) -> MultiPoly:
        kind, val, pos = self.take()
        if kind == "int":
            return MultiPoly.const(self.vs, int(val))
        if kind == "name":
            if val not in self.vs.names:
                raise UnknownVariableError(val, pos)
            return MultiPoly.var(self.vs, val)
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect_op(")")
            return p
        if kind == "end":
            raise PolySyntaxError("unexpected end of input", pos)
        raise PolySyntaxError(f"unexpected {val!r}", pos)


def mp_parse(text: str, varset: VarSet) -> MultiPoly:
    """Parse ``text`` as a polynomial over ``varset``.

    >>> vs = VarSet(("X", "Y", "Z"))
    >>> str(mp_parse("-(X - Y)^2", vs))
    '-X^2 + 2*X*Y - Y^2'
    """
    return _Parser(text, varset).parse()


def _monomial_text(names: tuple[str, ...], exps: tuple[int, ...]) -> str:
    parts = []
    for name, e in sorted(zip(names, exps)):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def to_text(p: MultiPoly) -> str:
    """Canonical text: descending lex order of terms, factors sorted by name."""
    if p.is_zero():
        return "0"
    names = p.varset.names
    out = []
    for exps, c in p.items():
        mono = _monomial_text(names, exps)
        c = Fraction(c)
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)
