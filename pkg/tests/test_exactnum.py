from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from arithdeg.exactnum import (AlgNum, FieldMismatchError, Interval, RepeatedRootsError, UniPoly, algnum_arith,
                               algnum_embed, context, count_roots, parse_rat, rat_normalize, rat_to_decimal,
                               refine_root, sturm_isolate)

# chi_10 / (x - 1); its largest real root from sympy's real_roots, frozen
CHI10_DEFLATED = UniPoly([1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1])
DELTA10 = "1.17628081825991750654407033847"
PLASTIC = "1.32471795724474602596090885448"

ints = st.integers(-10**30, 10**30)
small = st.integers(-20, 20)


def test_chi10_deflation_matches_sympy():
    x = sympy.Symbol("x")
    q = sympy.quo(sympy.expand(x**8 * (x**3 - x - 1) + x**3 + x**2 - 1), x - 1)
    assert UniPoly([int(c) for c in reversed(sympy.Poly(q, x).all_coeffs())]) == CHI10_DEFLATED


class TestRat:
    def test_examples(self):
        assert rat_normalize(4, 6) == Fraction(2, 3)
        assert rat_normalize(-3, -9) == Fraction(1, 3)
        r = rat_normalize(0, 7)
        assert (r.numerator, r.denominator) == (0, 1)

    def test_zero_denominator(self):
        with pytest.raises(ZeroDivisionError, match="division by zero"):
            rat_normalize(1, 0)

    def test_parse(self):
        assert parse_rat("1e-8") == Fraction(1, 10**8)
        assert parse_rat("-3/6") == Fraction(-1, 2)
        assert parse_rat("2.5") == Fraction(5, 2)

    def test_decimal_rounding_direction(self):
        assert rat_to_decimal(Fraction(2, 3), 3) == "0.666"
        assert rat_to_decimal(Fraction(2, 3), 3, upward=True) == "0.667"

    @given(ints, ints.filter(bool))
    def test_idempotent(self, n, d):
        r = rat_normalize(n, d)
        again = rat_normalize(r.numerator, r.denominator)
        assert (again.numerator, again.denominator) == (r.numerator, r.denominator)
        assert r.denominator > 0


class TestRoots:
    def test_plastic_number(self):
        (iso,) = sturm_isolate(UniPoly([-1, -1, 0, 1]), Interval(Fraction(1), Fraction(2)))
        assert iso.contains(Fraction(13247, 10000))
        r = refine_root(UniPoly([-1, -1, 0, 1]), iso, Fraction(1, 10**6))
        assert r.width < Fraction(1, 10**6)
        assert r.contains(Fraction(PLASTIC[:12]))

    def test_two_roots(self):
        isos = sturm_isolate(UniPoly([-1, 0, 1]), Interval(Fraction(-2), Fraction(2)))
        assert len(isos) == 2
        assert isos[0].contains(-1) and isos[1].contains(1)

    def test_linear_root(self):
        r = refine_root(UniPoly([-1, 1]), Interval(Fraction(0), Fraction(2)), Fraction(1, 1000))
        assert r.contains(1) and r.width < Fraction(1, 1000)

    def test_delta10(self):
        isos = sturm_isolate(CHI10_DEFLATED, Interval(Fraction(1), Fraction(2)))
        assert len(isos) == 1
        r = refine_root(CHI10_DEFLATED, isos[0], Fraction(1, 10**8))
        assert r.contains(Fraction(DELTA10[:16]))

    def test_repeated_roots(self):
        with pytest.raises(RepeatedRootsError, match="repeated roots"):
            sturm_isolate(UniPoly([1, -2, 1]), Interval(Fraction(-3), Fraction(3)))

    def test_no_roots(self):
        assert sturm_isolate(UniPoly([1, 0, 1]), Interval(Fraction(-5), Fraction(5))) == []

    @given(st.lists(small, min_size=2, max_size=7))
    def test_enclosures_change_sign(self, cs):
        p = UniPoly(cs)
        assume(p.degree >= 1 and p.is_squarefree())
        B = p.cauchy_bound() + 1
        for iso in sturm_isolate(p, Interval(-B, B)):
            r = refine_root(p, iso, Fraction(1, 10**6))
            assert iso.lo <= r.lo <= r.hi <= iso.hi
            assert p.sign_at(r.lo) * p.sign_at(r.hi) <= 0

    @given(st.lists(small, min_size=2, max_size=7))
    def test_root_count_matches_sympy(self, cs):
        p = UniPoly(cs)
        assume(p.degree >= 1 and p.is_squarefree())
        B = p.cauchy_bound() + 1
        x = sympy.Symbol("x")
        expected = len(sympy.real_roots(sympy.Poly(list(reversed(cs)), x)))
        assert len(sturm_isolate(p, Interval(-B, B))) == expected
        assert count_roots(p, -B, B) == expected


class TestAlgNum:
    m = UniPoly([-2, 0, 1])

    def t(self):
        return AlgNum(self.m, None, 1.4)

    def test_examples(self):
        t = self.t()
        one = AlgNum(self.m, UniPoly([1]), 1.4)
        assert (t * t).as_rational() == 2
        assert (t + (one - t)).as_rational() == 1
        assert algnum_arith(one, t, "/").repr == UniPoly([0, Fraction(1, 2)])

    def test_errors(self):
        t = self.t()
        other = AlgNum(UniPoly([-3, 0, 1]), None, 1.7)
        with pytest.raises(FieldMismatchError, match="field mismatch"):
            algnum_arith(t, other, "+")
        with pytest.raises(ZeroDivisionError):
            algnum_arith(t, t - t, "/")

    def test_embed(self):
        ctx = context(128)
        v = algnum_embed(self.t(), 128)
        assert abs(v - ctx.sqrt(2)) < ctx.mpf(2) ** -126
        assert algnum_embed(AlgNum.rational(Fraction(3, 2)), 64) == Fraction(3, 2)

    def test_embed_delta10(self):
        d = AlgNum(CHI10_DEFLATED, None, 1.176)
        assert abs(algnum_embed(d, 128) - context(128).mpf(DELTA10)) < 1e-28

    @given(st.lists(small, min_size=1, max_size=2))
    def test_inverse(self, cs):
        a = AlgNum(self.m, UniPoly(cs), 1.4)
        assume(not a.is_zero())
        assert (algnum_arith(a, algnum_arith(1, a, "/"), "*")).as_rational() == 1
