"""Sparse multivariate polynomials over Q.

Exponent vectors are packed into one Python int, ``FIELD`` bits per
variable with the first variable in the most significant field. Integer
order on packed keys is then lexicographic order on exponent vectors, and
monomial multiplication is integer addition.  The top bit of every field is
a guard bit kept clear, which makes divisibility of monomials a single
subtraction (SWAR borrow test).

Coefficients are ``int`` when integral and ``Fraction`` otherwise.
"""
from __future__ import annotations

import heapq
import operator
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Iterator, Mapping

FIELD = 32
MAX_EXP = (1 << (FIELD - 1)) - 1
_MASK = (1 << FIELD) - 1


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


@dataclass(frozen=True)
class VarSet:
    """Projective variables followed by parameter symbols."""

    proj_vars: tuple[str, ...]
    param_vars: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "proj_vars", tuple(self.proj_vars))
        object.__setattr__(self, "param_vars", tuple(self.param_vars))
        names = self.proj_vars + self.param_vars
        if not self.proj_vars:
            raise ValueError("a VarSet needs at least one projective variable")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")

    @property
    def names(self) -> tuple[str, ...]:
        return self.proj_vars + self.param_vars

    @property
    def nvars(self) -> int:
        return len(self.proj_vars) + len(self.param_vars)

    @property
    def nproj(self) -> int:
        return len(self.proj_vars)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None


class Packing:
    """Pack/unpack helpers for a fixed number of variables."""

    __slots__ = ("n", "shifts", "guard")

    def __init__(self, n: int):
        self.n = n
        self.shifts = tuple(FIELD * (n - 1 - i) for i in range(n))
        self.guard = sum(1 << (s + FIELD - 1) for s in self.shifts)

    def pack(self, exps: Iterable[int]) -> int:
        key = 0
        for e, s in zip(exps, self.shifts):
            if e < 0 or e > MAX_EXP:
                raise OverflowError(f"exponent {e} out of range")
            key |= e << s
        return key

    def unpack(self, key: int) -> tuple[int, ...]:
        return tuple((key >> s) & _MASK for s in self.shifts)

    def divides(self, small: int, big: int) -> bool:
        return ((big | self.guard) - small) & self.guard == self.guard

    def var_key(self, i: int, e: int = 1) -> int:
        return e << self.shifts[i]


_PACKINGS: dict[int, Packing] = {}


def packing_for(vs: VarSet | int) -> Packing:
    n = vs if isinstance(vs, int) else vs.nvars
    pk = _PACKINGS.get(n)
    if pk is None:
        pk = _PACKINGS[n] = Packing(n)
    return pk


class MultiPoly:
    __slots__ = ("varset", "terms", "_pk")

    def __init__(self, varset: VarSet, terms: Mapping[int, object] | None = None, *, _trusted: bool = False):
        self.varset = varset
        self._pk = packing_for(varset)
        if terms is None:
            self.terms: dict[int, object] = {}
        elif _trusted:
            self.terms = terms  # type: ignore[assignment]
        else:
            self.terms = {k: _norm(Fraction(c) if not isinstance(c, (int, Fraction)) else c)
                          for k, c in terms.items() if c != 0}

    # construction -------------------------------------------------------
    @classmethod
    def from_exps(cls, varset: VarSet, items: Mapping[tuple[int, ...], object] | Iterable) -> "MultiPoly":
        pk = packing_for(varset)
        pairs = items.items() if isinstance(items, Mapping) else items
        out: dict[int, object] = {}
        for exps, c in pairs:
            exps = tuple(exps)
            if len(exps) != varset.nvars:
                raise ValueError(f"exponent vector {exps} has wrong length for {varset.names}")
            k = pk.pack(exps)
            out[k] = out.get(k, 0) + c
        return cls(varset, out)

    @classmethod
    def const(cls, varset: VarSet, c) -> "MultiPoly":
        return cls(varset, {0: c})

    @classmethod
    def var(cls, varset: VarSet, name: str) -> "MultiPoly":
        pk = packing_for(varset)
        return cls(varset, {pk.var_key(varset.index(name)): 1}, _trusted=True)

    @classmethod
    def gens(cls, varset: VarSet) -> list["MultiPoly"]:
        return [cls.var(varset, n) for n in varset.names]

    def _new(self, terms: dict[int, object]) -> "MultiPoly":
        return MultiPoly(self.varset, terms, _trusted=True)

    # inspection ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def items(self) -> Iterator[tuple[tuple[int, ...], object]]:
        """(exponent vector, coefficient) pairs in descending lex order."""
        unpack = self._pk.unpack
        for k in sorted(self.terms, reverse=True):
            yield unpack(k), self.terms[k]

    def exps_dict(self) -> dict[tuple[int, ...], Fraction]:
        return {e: Fraction(c) for e, c in self.items()}

    def leading_key(self) -> int:
        return max(self.terms)

    @property
    def leading_coeff(self):
        return self.terms[max(self.terms)]

    def degree(self, name: str) -> int:
        if not self.terms:
            raise ValueError("degree of zero")
        s = self._pk.shifts[self.varset.index(name)]
        return max((k >> s) & _MASK for k in self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            raise ValueError("degree of zero")
        return max(sum(self._pk.unpack(k)) for k in self.terms)

    def proj_degrees(self) -> set[int]:
        np_ = self.varset.nproj
        return {sum(self._pk.unpack(k)[:np_]) for k in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.proj_degrees()) <= 1

    def variables(self) -> set[str]:
        used = 0
        for k in self.terms:
            used |= k
        return {n for n, s in zip(self.varset.names, self._pk.shifts) if (used >> s) & _MASK}

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.terms.values())

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "MultiPoly"):
        if other.varset != self.varset:
            raise ValueError(f"varset mismatch: {self.varset.names} vs {other.varset.names}")

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(self.varset, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        get = out.get
        for k, c in other.terms.items():
            v = get(k, 0) + c
            if v:
                out[k] = _norm(v)
            else:
                out.pop(k, None)
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def scale(self, c) -> "MultiPoly":
        if c == 0:
            return self._new({})
        return self._new({k: _norm(v * c) for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        self._degree_guard(other)
        return self._new(mul_terms(self.terms, other.terms))

    __rmul__ = __mul__

    def _degree_guard(self, other: "MultiPoly") -> None:
        # OR of all keys bounds every field from above
        if self.terms and other.terms:
            oa = reduce(operator.or_, self.terms)
            ob = reduce(operator.or_, other.terms)
            for s in self._pk.shifts:
                if ((oa >> s) & _MASK) + ((ob >> s) & _MASK) > MAX_EXP:
                    raise OverflowError("exponent overflow in product")

    def __pow__(self, e: int) -> "MultiPoly":
        if e < 0:
            raise ValueError("negative power")
        result = MultiPoly.const(self.varset, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(self.varset, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.varset == other.varset and self.terms == other.terms

    def __hash__(self):
        return hash((self.varset, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"MultiPoly({self})"

    def __str__(self) -> str:
        from arithdeg.multipoly.parse import to_text

        return to_text(self)

    # calculus and structure ---------------------------------------------
    def derivative(self, name: str) -> "MultiPoly":
        i = self.varset.index(name)
        s = self._pk.shifts[i]
        one = 1 << s
        out = {}
        for k, c in self.terms.items():
            e = (k >> s) & _MASK
            if e:
                out[k - one] = _norm(c * e)
        return self._new(out)

    def monomial_content(self) -> int:
        """Packed key of the largest monomial dividing every term."""
        if not self.terms:
            return 0
        n = self.varset.nvars
        mins = [MAX_EXP] * n
        unpack = self._pk.unpack
        for k in self.terms:
            for i, e in enumerate(unpack(k)):
                if e < mins[i]:
                    mins[i] = e
        return self._pk.pack(mins)

    def shift_down(self, key: int) -> "MultiPoly":
        return self._new({k - key: c for k, c in self.terms.items()})

    def shift_up(self, key: int) -> "MultiPoly":
        return self._new({k + key: c for k, c in self.terms.items()})

    def integer_content(self) -> Fraction:
        """Positive rational ``c`` with ``self / c`` integral and primitive."""
        if not self.terms:
            return Fraction(0)
        vals = list(self.terms.values())
        den = reduce(lcm, (Fraction(v).denominator for v in vals), 1)
        g = reduce(gcd, (int(v * den) for v in vals), 0)
        return Fraction(g, den)

    def primitive(self) -> "MultiPoly":
        """Integral primitive associate with positive lex-leading coefficient."""
        if not self.terms:
            return self
        c = self.integer_content()
        if self.leading_coeff < 0:
            c = -c
        if c == 1:
            return self
        return self._new({k: _norm(v / c) for k, v in self.terms.items()})

    def exact_div(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        q = divide_terms(self.terms, other.terms, self._pk)
        if q is None:
            raise ValueError("inexact multivariate division")
        return self._new(q)

    def divides(self, other: "MultiPoly") -> bool:
        self._check(other)
        return divide_terms(other.terms, self.terms, self._pk) is not None

    def with_varset(self, varset: VarSet) -> "MultiPoly":
        """Re-express over another varset that contains every used variable."""
        if varset == self.varset:
            return self
        idx = [varset.index(n) for n in self.varset.names]
        pk = packing_for(varset)
        out = {}
        for k, c in self.terms.items():
            exps = [0] * varset.nvars
            for i, e in zip(idx, self._pk.unpack(k)):
                exps[i] = e
            out[pk.pack(exps)] = c
        return MultiPoly(varset, out, _trusted=True)

    def __call__(self, **bindings):
        from arithdeg.multipoly.evaluate import mp_eval

        return mp_eval(self, bindings)


def mul_terms(a: dict, b: dict) -> dict:
    if len(a) < len(b):
        a, b = b, a
    out: dict[int, object] = {}
    get = out.get
    for eb, cb in b.items():
        for ea, ca in a.items():
            k = ea + eb
            out[k] = get(k, 0) + ca * cb
    return {k: _norm(v) for k, v in out.items() if v}


def divide_terms(a: dict, b: dict, pk: Packing, over_z: bool = False) -> dict | None:
    """Exact quotient ``a / b`` of term dicts, or ``None`` if ``b`` does not divide ``a``.

    Division is over Q; with ``over_z`` and integer inputs it is over Z, which
    is faster and what trial division of primitive polynomials needs.
    """
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    if not a:
        return {}
    integral = all(isinstance(c, int) for c in b.values()) and all(isinstance(c, int) for c in a.values())
    q = _divide(a, b, pk, integral)
    if q is None and integral and not over_z:
        q = _divide(a, b, pk, False)
    return q


def _divide(a: dict, b: dict, pk: Packing, integral: bool) -> dict | None:
    lb = max(b)
    lcb = b[lb]
    if integral:
        rest_b = [(k, -c) for k, c in b.items() if k != lb]
    else:
        inv = 1 / Fraction(lcb)
        rest_b = [(k, -c * inv) for k, c in b.items() if k != lb]
    rem = dict(a)
    heap = [-k for k in rem]
    heapq.heapify(heap)
    pop, push, rget = heapq.heappop, heapq.heappush, rem.get
    quo: dict[int, object] = {}
    guard = pk.guard
    while heap:
        k = -pop(heap)
        c = rem.pop(k)
        if not c:
            continue
        if ((k | guard) - lb) & guard != guard:
            return None
        qk = k - lb
        if integral:
            qc, r = divmod(c, lcb)
            if r:
                return None
            for kb, cb in rest_b:
                t = qk + kb
                old = rget(t)
                if old is None:
                    rem[t] = qc * cb
                    push(heap, -t)
                else:
                    rem[t] = old + qc * cb
            quo[qk] = qc
        else:
            # rest_b is pre-scaled by 1/lcb, so subtract c * rest_b
            for kb, cb in rest_b:
                t = qk + kb
                old = rget(t)
                if old is None:
                    rem[t] = c * cb
                    push(heap, -t)
                else:
                    rem[t] = old + c * cb
            quo[qk] = _norm(Fraction(c) / lcb)
    return {k: _norm(v) for k, v in quo.items()} if not integral else quo


def monomial_poly(varset: VarSet, exps: tuple[int, ...], c=1) -> MultiPoly:
    return MultiPoly.from_exps(varset, {exps: c})
