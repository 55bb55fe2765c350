"""Dense univariate polynomials over Q and certified real-root isolation.

Roots are isolated with Sturm sequences built from integer primitive
pseudo-remainders (positive scalings only, so sign patterns survive), and
refined by exact sign bisection.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

from arithdeg.exactnum.rational import as_rat, simplest_between


class RepeatedRootsError(ValueError):
    pass


def _strip(coeffs: list[Fraction]) -> tuple[Fraction, ...]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class UniPoly:
    """Polynomial with ascending rational coefficients (constant term first)."""

    __slots__ = ("coeffs", "_ints")

    def __init__(self, coeffs: Iterable = ()):
        self.coeffs: tuple[Fraction, ...] = _strip([as_rat(c) for c in coeffs])
        self._ints: list[int] | None = None

    @classmethod
    def x(cls) -> "UniPoly":
        return cls([0, 1])

    @classmethod
    def const(cls, c) -> "UniPoly":
        return cls([c])

    @classmethod
    def monomial(cls, deg: int, c=1) -> "UniPoly":
        return cls([0] * deg + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        if not self.coeffs:
            raise ValueError("leading coefficient of zero polynomial")
        return self.coeffs[-1]

    def __repr__(self) -> str:
        return f"UniPoly({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            mag = abs(c)
            body = str(mag) if (mag != 1 or not mono) else ""
            if body and mono:
                body += "*"
            parts.append(("-" if c < 0 else "+", body + mono))
        head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return " ".join([head] + [f"{s} {t}" for s, t in parts[1:]])

    def __eq__(self, other) -> bool:
        if not isinstance(other, UniPoly):
            other = UniPoly([other])
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def _coerce(self, other) -> "UniPoly":
        return other if isinstance(other, UniPoly) else UniPoly([other])

    def __add__(self, other) -> "UniPoly":
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return UniPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other) -> "UniPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "UniPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "UniPoly":
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UniPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "UniPoly":
        result = UniPoly([1])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        rem = list(self.coeffs)
        dq = self.degree - other.degree
        if dq < 0:
            return UniPoly(), self
        quo = [Fraction(0)] * (dq + 1)
        lc = other.lc
        db = other.degree
        for k in range(dq, -1, -1):
            c = rem[k + db] / lc
            quo[k] = c
            if c:
                for j, cb in enumerate(other.coeffs):
                    rem[k + j] -= c * cb
        return UniPoly(quo), UniPoly(rem[:db])

    def __floordiv__(self, other) -> "UniPoly":
        return self.divmod(self._coerce(other))[0]

    def __mod__(self, other) -> "UniPoly":
        return self.divmod(self._coerce(other))[1]

    def exact_div(self, other: "UniPoly") -> "UniPoly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ValueError("inexact polynomial division")
        return q

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        lc = self.lc
        return UniPoly([c / lc for c in self.coeffs])

    def derivative(self) -> "UniPoly":
        return UniPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        """Horner evaluation; ``x`` may be any ring element supporting + and *."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_mp(self, ctx, x):
        from arithdeg.exactnum.bigfloat import to_mp

        acc = ctx.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * x + to_mp(ctx, c)
        return acc

    def sign_at(self, x: Fraction) -> int:
        """Exact sign of ``self(x)`` using integer arithmetic only."""
        if self._ints is None:
            self._ints = self.primitive_ints()
        return _sign_int_poly(self._ints, as_rat(x))

    def primitive_ints(self) -> list[int]:
        """Integer coefficients proportional to ``self`` by a positive factor."""
        if not self.coeffs:
            return []
        den = reduce(lambda a, b: a * b // gcd(a, b), (c.denominator for c in self.coeffs), 1)
        ints = [int(c * den) for c in self.coeffs]
        g = reduce(gcd, ints, 0)
        return [c // g for c in ints]

    def gcd(self, other: "UniPoly") -> "UniPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def squarefree_part(self) -> "UniPoly":
        if self.degree <= 0:
            return self
        g = self.gcd(self.derivative())
        return (self // g).monic() if g.degree > 0 else self.monic()

    def is_squarefree(self) -> bool:
        return self.degree <= 0 or self.gcd(self.derivative()).degree == 0

    def cauchy_bound(self) -> Fraction:
        """All complex roots satisfy ``|z| < cauchy_bound()``."""
        lc = abs(self.lc)
        return 1 + max((abs(c) / lc for c in self.coeffs[:-1]), default=Fraction(0))


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_rat(self.lo))
        object.__setattr__(self, "hi", as_rat(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def strictly_below(self, other: "Interval") -> bool:
        return self.hi < other.lo

    def overlaps(self, other: "Interval") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def __str__(self) -> str:
        return f"[{float(self.lo):.12g}, {float(self.hi):.12g}]"


def _prem_positive(a: list[int], b: list[int]) -> list[int]:
    """|lc(b)|^(deg a - deg b + 1) * a mod b over the integers."""
    r = list(a)
    db = len(b) - 1
    lcb = b[-1]
    scale = abs(lcb)
    sgn = 1 if lcb > 0 else -1
    while len(r) - 1 >= db and r:
        shift = len(r) - 1 - db
        lr = r[-1]
        # r <- |lcb| * r - sgn * lr * x^shift * b, which kills the leading term
        r = [c * scale for c in r]
        t = sgn * lr
        for j, cb in enumerate(b):
            r[shift + j] -= t * cb
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return r


def _primitive(c: list[int]) -> list[int]:
    g = reduce(gcd, c, 0)
    return [x // g for x in c] if g > 1 else c


def sturm_sequence(p: UniPoly) -> list[list[int]]:
    """Sturm chain of ``p`` as integer coefficient lists, each scaled by a positive factor."""
    if p.is_zero():
        raise ValueError("Sturm sequence of zero polynomial")
    s0 = p.primitive_ints()
    s1 = _primitive(p.derivative().primitive_ints()) if p.degree > 0 else []
    seq = [s0]
    if s1:
        seq.append(s1)
    while len(seq[-1]) > 1:
        r = _prem_positive(seq[-2], seq[-1])
        if not r:
            break
        seq.append(_primitive([-c for c in r]))
    if len(seq[-1]) > 1:
        raise RepeatedRootsError("repeated roots")
    return seq


def _sign_int_poly(c: list[int], x: Fraction) -> int:
    # sign of sum c_i p^i q^(d-i) = q^d * c(p/q), Horner in p carrying q powers
    p, q = x.numerator, x.denominator
    acc = 0
    qp = 1
    for i in range(len(c) - 1, -1, -1):
        acc = acc * p + c[i] * qp
        qp *= q
    return (acc > 0) - (acc < 0)


def sign_variations(seq: Sequence[list[int]], x: Fraction) -> int:
    count = 0
    last = 0
    for s in seq:
        v = _sign_int_poly(s, x)
        if v == 0:
            continue
        if last and v != last:
            count += 1
        last = v
    return count


def count_roots(p: UniPoly, lo, hi) -> int:
    """Number of distinct real roots in the half-open interval ``(lo, hi]``."""
    seq = sturm_sequence(p)
    return sign_variations(seq, as_rat(lo)) - sign_variations(seq, as_rat(hi))


def _split(lo: Fraction, hi: Fraction) -> Fraction:
    # small-denominator split point in the middle half: exact rational roots get hit
    w = hi - lo
    return simplest_between(lo + w / 4, hi - w / 4)


def sturm_isolate(p: UniPoly, rng: Interval) -> list[Interval]:
    """Disjoint closed intervals, each holding exactly one real root of ``p`` in ``rng``.

    ``p`` must be square-free. Exact rational roots come back as
    zero-width intervals.
    """
    if p.is_zero():
        raise ValueError("cannot isolate roots of the zero polynomial")
    seq = sturm_sequence(p)
    lo, hi = rng.lo, rng.hi
    out: list[Interval] = []
    if p.sign_at(lo) == 0:
        out.append(Interval(lo, lo))
    if lo == hi:
        return out
    stack = [(lo, hi, sign_variations(seq, lo), sign_variations(seq, hi))]
    while stack:
        a, b, va, vb = stack.pop()
        k = va - vb
        if k == 0:
            continue
        if k == 1:
            if p.sign_at(b) == 0:
                out.append(Interval(b, b))
                continue
            if p.sign_at(a) != 0:
                out.append(Interval(a, b))
                continue
        m = _split(a, b)
        vm = sign_variations(seq, m)
        stack.append((m, b, vm, vb))
        stack.append((a, m, va, vm))
    out.sort(key=lambda iv: iv.lo)
    # neighbours may share a (non-root) split point; shrink until closed intervals are disjoint
    for i in range(len(out) - 1):
        while out[i].hi >= out[i + 1].lo:
            out[i] = refine_root(p, out[i], out[i].width / 2)
            out[i + 1] = refine_root(p, out[i + 1], out[i + 1].width / 2)
    return out


def refine_root(p: UniPoly, iso: Interval, eps) -> Interval:
    """Shrink an isolating interval of a simple root below width ``eps``."""
    eps = as_rat(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    lo, hi = iso.lo, iso.hi
    if lo == hi:
        return iso
    slo = p.sign_at(lo)
    shi = p.sign_at(hi)
    if slo == 0:
        return Interval(lo, lo)
    if shi == 0:
        return Interval(hi, hi)
    if slo == shi:
        raise ValueError("interval does not bracket a sign change")
    while hi - lo >= eps:
        m = _split(lo, hi)
        sm = p.sign_at(m)
        if sm == 0:
            return Interval(m, m)
        if sm == slo:
            lo = m
        else:
            hi = m
    return Interval(lo, hi)


def largest_real_root(p: UniPoly, eps, floor_=None) -> Interval | None:
    """Enclosure of the largest real root of square-free ``p`` (optionally above ``floor_``)."""
    bound = p.cauchy_bound()
    lo = as_rat(floor_) if floor_ is not None else -bound
    isos = sturm_isolate(p, Interval(lo, bound))
    if not isos:
        return None
    return refine_root(p, isos[-1], eps)
