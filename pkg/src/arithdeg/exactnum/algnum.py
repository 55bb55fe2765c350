"""Elements of Q[t]/(m(t)) together with a chosen complex embedding."""
from __future__ import annotations

from fractions import Fraction

from arithdeg.exactnum.bigfloat import context, to_mp
from arithdeg.exactnum.rational import as_rat
from arithdeg.exactnum.unipoly import Interval, UniPoly, refine_root, sturm_isolate


class FieldMismatchError(ValueError):
    pass


class InsufficientPrecisionError(ArithmeticError):
    pass


class AlgNum:
    """Exact algebraic number ``repr(t)`` where ``t`` is a root of ``minpoly``.

    ``minpoly`` is assumed irreducible; only square-freeness is checked.
    ``embedding`` is an approximate complex value of ``t`` that singles out
    one root of ``minpoly``.
    """

    __slots__ = ("minpoly", "repr", "embedding")

    def __init__(self, minpoly: UniPoly, repr_: UniPoly | None = None, embedding: complex = 0j,
                 _checked: bool = False):
        if not _checked:
            if minpoly.degree < 1:
                raise ValueError("minimal polynomial must have degree >= 1")
            minpoly = minpoly.monic()
            if not minpoly.is_squarefree():
                raise ValueError("minimal polynomial is not square-free")
        self.minpoly = minpoly
        r = UniPoly.x() if repr_ is None else repr_
        self.repr = r % minpoly if r.degree >= minpoly.degree else r
        self.embedding = complex(embedding)

    @classmethod
    def rational(cls, q) -> "AlgNum":
        q = as_rat(q)
        return cls(UniPoly([-q, 1]), UniPoly([q]), complex(q))

    def _same(self, r: UniPoly) -> "AlgNum":
        return AlgNum(self.minpoly, r, self.embedding, _checked=True)

    def _lift(self, other) -> UniPoly:
        if isinstance(other, AlgNum):
            if other.minpoly != self.minpoly:
                raise FieldMismatchError("field mismatch")
            return other.repr
        if isinstance(other, (int, Fraction)):
            return UniPoly([other])
        return NotImplemented

    def __add__(self, other):
        r = self._lift(other)
        return NotImplemented if r is NotImplemented else self._same(self.repr + r)

    __radd__ = __add__

    def __sub__(self, other):
        r = self._lift(other)
        return NotImplemented if r is NotImplemented else self._same(self.repr - r)

    def __rsub__(self, other):
        r = self._lift(other)
        return NotImplemented if r is NotImplemented else self._same(r - self.repr)

    def __neg__(self):
        return self._same(-self.repr)

    def __mul__(self, other):
        r = self._lift(other)
        return NotImplemented if r is NotImplemented else self._same((self.repr * r) % self.minpoly)

    __rmul__ = __mul__

    def inverse(self) -> "AlgNum":
        if self.repr.is_zero():
            raise ZeroDivisionError("division by zero")
        # extended Euclid: s*repr + u*minpoly = g
        r0, r1 = self.minpoly, self.repr
        s0, s1 = UniPoly(), UniPoly([1])
        while not r1.is_zero():
            q, r = r0.divmod(r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
        if r0.degree != 0:
            # repr shares a factor with minpoly: zero in some embedding of a reducible minpoly
            raise ZeroDivisionError("division by zero (reducible minimal polynomial?)")
        return self._same((s0 * (1 / r0.coeffs[0])) % self.minpoly)

    def __truediv__(self, other):
        if isinstance(other, AlgNum):
            self._lift(other)
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self._same(self.repr * (1 / as_rat(other)))
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, e: int) -> "AlgNum":
        if e < 0:
            return self.inverse() ** (-e)
        result = self._same(UniPoly([1]))
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        try:
            r = self._lift(other)
        except FieldMismatchError:
            return False
        if r is NotImplemented:
            return NotImplemented
        return self.repr == r

    def __hash__(self):
        return hash((self.minpoly, self.repr))

    def is_zero(self) -> bool:
        return self.repr.is_zero()

    def as_rational(self) -> Fraction | None:
        return self.repr.coeffs[0] if self.repr.degree <= 0 and self.repr.coeffs else (
            Fraction(0) if self.repr.is_zero() else None)

    def __repr__(self) -> str:
        return f"AlgNum({self.repr} mod {self.minpoly}, t~{self.embedding})"


def _generator_value(a: AlgNum, ctx, prec: int):
    m = a.minpoly
    if m.degree == 1:
        return to_mp(ctx, -m.coeffs[0])
    roots = ctx.polyroots([to_mp(ctx, c) for c in reversed(m.coeffs)], maxsteps=400, extraprec=2 * prec)
    z0 = ctx.mpc(a.embedding.real, a.embedding.imag)
    roots = sorted(roots, key=lambda z: abs(z - z0))
    d0 = abs(roots[0] - z0)
    if not abs(roots[1] - z0) > 2 * d0:
        raise InsufficientPrecisionError("insufficient precision")
    r0 = roots[0]
    sep = min(abs(r0 - z) for z in roots[1:])
    if abs(ctx.im(r0)) < sep / 4:
        # real root: redo it with an exact Sturm enclosure
        for iv in sturm_isolate(m, Interval(-m.cauchy_bound(), m.cauchy_bound())):
            iv = refine_root(m, iv, Fraction(1, 2**20))
            if abs(to_mp(ctx, iv.mid) - ctx.re(r0)) < sep / 4:
                iv = refine_root(m, iv, Fraction(1, 2 ** (prec + 8)))
                return to_mp(ctx, iv.mid)
    return r0


def algnum_embed(a: AlgNum, prec: int):
    """Value of ``a`` under its embedding, to ``prec`` bits.

    Real embeddings return an ``mpf``; complex ones an ``mpc``.
    """
    ctx = context(prec + 16)
    t = _generator_value(a, ctx, prec)
    val = a.repr.eval_mp(ctx, t)
    out = context(prec)
    if isinstance(val, type(ctx.mpc(0))):
        return out.mpc(val.real, val.imag)
    return out.mpf(val)


def algnum_arith(a: AlgNum, b, op: str):
    ops = {"+": AlgNum.__add__, "-": AlgNum.__sub__, "*": AlgNum.__mul__, "/": AlgNum.__truediv__}
    if op not in ops:
        raise ValueError(f"unknown operation {op!r}")
    if not isinstance(a, AlgNum):
        if not isinstance(b, AlgNum):
            raise TypeError("at least one operand must be an AlgNum")
        a = b._same(UniPoly([as_rat(a)]))
    return ops[op](a, b)
