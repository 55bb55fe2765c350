from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from arithdeg.exactnum import UniPoly, context
from arithdeg.spectral import (IsometryError, NonRealDominantError, OrbitData, certify_monotone, char_poly, chi,
                               delta, delta_star, delta_table, geometric_orbit_data, intersection_form,
                               picard_matrix, search_orbit_data, spectral_radius, strip_cyclotomic)

DELTA10 = Fraction("1.17628081825991750654")  # sympy real_roots of chi_10/(x-1)


def matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def transpose(A):
    return [list(r) for r in zip(*A)]


class TestChi:
    def test_n10(self):
        assert chi(10).poly == UniPoly([-1, 0, 1, 1, 0, 0, 0, 0, -1, -1, 0, 1])

    def test_root_at_one(self):
        for n in range(10, 201):
            assert chi(n).poly(Fraction(1)) == 0

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            chi(9)

    def test_vanishes_at_plastic_number_in_the_limit(self):
        ctx = context(256)
        d = ctx.findroot(lambda x: x**3 - x - 1, 1.3)
        vals = [abs(chi(n).poly.eval_mp(ctx, d)) for n in (10, 50, 100, 200)]
        # the leading block is killed, leaving x^3 + x^2 - 1 at d
        limit = abs(d**3 + d**2 - 1)
        assert all(abs(v - limit) < 1e-60 for v in vals)


class TestDelta:
    def test_delta10(self):
        D = delta(10, Fraction(1, 1000))
        assert D.width < Fraction(1, 1000)
        assert D.lo > Fraction(117, 100) and D.hi < Fraction(118, 100)
        assert abs(delta(10, Fraction(1, 10**20)).mid - DELTA10) < Fraction(1, 10**19)

    def test_delta_star(self):
        S = delta_star(Fraction(1, 10**5))
        assert S.contains(Fraction("1.32472"))
        assert S.width < Fraction(1, 10**5)
        cubic = UniPoly([-1, -1, 0, 1])
        assert cubic.sign_at(S.lo) * cubic.sign_at(S.hi) < 0
        m = S.mid
        assert abs(m**3 - m - 1) < 10 * Fraction(1, 10**5)

    def test_monotone(self):
        rep = certify_monotone(10, 60, Fraction(1, 10**8))
        assert rep.ok
        for lo, hi in zip(rep.enclosures, rep.enclosures[1:]):
            assert lo.hi < hi.lo
        assert rep.enclosures[-1].hi < rep.star.lo

    def test_table(self):
        rows = delta_table([10, 11], Fraction(1, 10**8)).splitlines()
        assert rows[0].replace(" ", "") == "n,lo,hi,width"
        assert rows[1].startswith("10,1.17628081")


class TestCharPoly:
    def test_examples(self):
        assert char_poly([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == UniPoly([-1, 3, -3, 1])
        assert char_poly([[2, 0], [0, -1]]) == UniPoly([-2, -1, 1])

    @given(st.integers(1, 5).flatmap(
        lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=n, max_size=n)))
    def test_cayley_hamilton(self, M):
        p = char_poly(M)
        n = len(M)
        acc = [[0] * n for _ in range(n)]
        for c in reversed(p.coeffs):
            acc = matmul(acc, M)
            for i in range(n):
                acc[i][i] += c
        assert all(v == 0 for row in acc for v in row)

    @given(st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=n, max_size=n)))
    def test_matches_sympy(self, M):
        import sympy

        x = sympy.Symbol("x")
        expected = sympy.Matrix(M).charpoly(x).all_coeffs()
        assert char_poly(M) == UniPoly([int(c) for c in reversed(expected)])


class TestSpectralRadius:
    def test_examples(self):
        R = spectral_radius([[3, 0], [0, 1]], Fraction(1, 10**6))
        assert R.lo == R.hi == 3
        P = spectral_radius([[0, 1, 0], [0, 0, 1], [1, 0, 0]], Fraction(1, 10**6))
        assert P.contains(1)

    def test_non_real(self):
        with pytest.raises(NonRealDominantError):
            spectral_radius([[0, -1], [1, 0]], Fraction(1, 100))

    def test_power_iteration(self):
        R = spectral_radius([[2, 1], [1, 2]], Fraction(1, 10**10), method="power")
        assert R.contains(3) or abs(R.mid - 3) < Fraction(1, 10**8)


class TestPicard:
    def test_geometric_matrix(self):
        P = picard_matrix(10, geometric_orbit_data(10))
        assert len(P.M) == 11 and P.M[0][0] == 2
        J = intersection_form(10)
        assert matmul(matmul(transpose(P.rows()), J), P.rows()) == J

    def test_spectral_radius_is_delta10(self):
        P = picard_matrix(10, geometric_orbit_data(10))
        R = spectral_radius(P.rows(), Fraction(1, 10**9))
        D = delta(10, Fraction(1, 10**9))
        assert R.overlaps(D) and abs(R.mid - D.mid) < Fraction(1, 10**8)

    def test_char_poly_is_chi(self):
        for n in (10, 13, 17):
            assert char_poly(picard_matrix(n, geometric_orbit_data(n)).rows()) == chi(n).poly

    def test_search(self):
        res = search_orbit_data(10)
        assert any(d.label == "geometric" for d in res.accepted)
        for d in res.accepted:
            cp = char_poly(picard_matrix(10, d).rows())
            q, r = cp.divmod(res.target)
            assert r.is_zero()
            rest, _ = strip_cyclotomic(q)
            assert rest.degree == 0

    def test_cyclotomic_cofactor_on_unit_circle(self):
        target, cyc = strip_cyclotomic(chi(10).poly)
        q = chi(10).poly.exact_div(target)
        roots = mpmath.polyroots([float(c) for c in reversed(q.coeffs)], maxsteps=200, extraprec=200)
        assert all(abs(abs(r) - 1) < 1e-10 for r in roots)
        assert 1 in cyc

    def test_not_an_isometry(self):
        bad = OrbitData(3, (1, 2, 3), ((1, (2, 3)),), ((2, 1), (3, 2)))
        with pytest.raises(IsometryError):
            picard_matrix(3, bad)
