import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from arithdeg.exactnum import AlgNum, UniPoly
from arithdeg.heightlab import (COMPLETED, HIT_INDETERMINACY, RESOURCE_LIMIT, ExtensionHeightError, OrbitLimits,
                                alpha_estimate, h_plus, height_growth_bound, orbit, orbit_csv, point_normalize,
                                weil_height)
from arithdeg.rationalmap import identity_map, map_builtin

coords = st.integers(-10**6, 10**6)
points = st.lists(coords, min_size=3, max_size=3).filter(any)


def rand_point(rng, dim, bound=50):
    while True:
        P = [rng.randint(-bound, bound) for _ in range(dim + 1)]
        if any(P):
            return P


class TestPoints:
    def test_examples(self):
        assert point_normalize([2, 4, 6]).coords == (1, 2, 3)
        assert point_normalize([Fraction(1, 2), Fraction(1, 3), 1]).coords == (3, 2, 6)
        assert point_normalize([-1, -2, -3]).coords == (1, 2, 3)

    def test_zero(self):
        with pytest.raises(ValueError):
            point_normalize([0, 0, 0])

    def test_extension_mode(self):
        t = AlgNum(UniPoly([-2, 0, 1]), None, 1.4)
        P = point_normalize([t, t * t, t])
        assert P.mode == "extension"
        assert P.coords[0].as_rational() == 1
        with pytest.raises(ExtensionHeightError):
            weil_height(P)


class TestHeights:
    def test_examples(self):
        assert abs(weil_height([1, 2, 3]) - math.log(3)) < 1e-15
        assert weil_height([0, 0, 1]) == 0
        assert abs(weil_height([4, 6, 10]) - math.log(5)) < 1e-15

    def test_h_plus(self):
        assert h_plus(0) == 1
        assert h_plus(0.5) == 1
        assert h_plus(7.2) == 7.2

    @given(points, st.integers(1, 10**6), st.integers(1, 50))
    def test_scaling_invariance(self, P, num, den):
        s = Fraction(num, den)
        assert weil_height(P) == weil_height([s * c for c in P])

    def test_growth_bound_values(self):
        assert abs(height_growth_bound(map_builtin("f4")) - math.log(2)) < 1e-15
        assert abs(height_growth_bound(map_builtin("fiber", {"a": 1, "b": 1})) - math.log(2)) < 1e-15
        assert height_growth_bound(identity_map(map_builtin("fiber").varset)) == 0

    @pytest.mark.parametrize("name,params,dim", [("f4", None, 4), ("fiber", {"a": 1, "b": 1}, 2)])
    def test_growth_bound_holds(self, name, params, dim):
        f = map_builtin(name, params)
        C = height_growth_bound(f)
        rng = random.Random(11)
        checked = 0
        while checked < 1000:
            P = rand_point(rng, dim)
            rec = orbit(f, P, 1)
            if len(rec.points) < 2:
                continue
            assert rec.heights[1] <= f.degree * rec.heights[0] + C
            checked += 1


class TestOrbit:
    def test_fiber_orbit(self):
        rec = orbit(map_builtin("fiber", {"a": 1, "b": 1}), [1, 1, 1], 3)
        # affine (1,1) -> (2,2) -> (3,2) -> (3, 5/3)
        assert [p.coords for p in rec.points] == [(1, 1, 1), (2, 2, 1), (3, 2, 1), (9, 5, 3)]
        assert rec.stop_reason == COMPLETED

    def test_hits_indeterminacy(self):
        rec = orbit(map_builtin("fiber", {"a": 1, "b": 1}), [0, 0, 1], 1)
        assert rec.stop_reason == HIT_INDETERMINACY and rec.stop_step == 0

    def test_identity(self):
        rec = orbit(identity_map(map_builtin("f4").varset), [3, 1, 4, 1, 5], 6)
        assert len({p.coords for p in rec.points}) == 1
        est = alpha_estimate(rec)
        # roots of a constant height only tend to 1; the ratio estimator is exactly 1
        assert est.ratio_min == est.ratio_max == 1
        assert est.roots[-1] < est.roots[0]
        small = alpha_estimate(orbit(identity_map(map_builtin("f4").varset), [1, -1, 0, 1, 1], 8))
        assert small.window_min == small.window_max == 1

    def test_heights_match_points(self):
        rec = orbit(map_builtin("f4"), [1, 2, 3, 4, 5], 8)
        assert all(h == weil_height(p) for h, p in zip(rec.heights, rec.points))

    def test_step_bound(self):
        f = map_builtin("f4")
        C = height_growth_bound(f)
        rec = orbit(f, [2, -3, 5, 7, 1], 10)
        for h0, h1 in zip(rec.heights, rec.heights[1:]):
            assert h1 <= 2 * h0 + C

    def test_resource_limit(self):
        rec = orbit(map_builtin("f4"), [1, 1, 1, 1, 1], 40, OrbitLimits(max_height_bits=64))
        assert rec.stop_reason == RESOURCE_LIMIT

    def test_deterministic(self):
        f = map_builtin("f4")
        assert orbit_csv(orbit(f, [1, 1, 1, 1, 1], 8)) == orbit_csv(orbit(f, [1, 1, 1, 1, 1], 8))

    def test_csv_columns(self):
        text = orbit_csv(orbit(map_builtin("f4"), [1, 1, 1, 1, 1], 2))
        assert text.splitlines()[0].replace(" ", "") == "step,coords,height_nats,hplus_root"


class TestAlpha:
    def test_constant(self):
        est = alpha_estimate([0] * 10)
        assert est.window_min == est.window_max == 1 and est.converged

    def test_linear_heights(self):
        est = alpha_estimate([n * math.log(2) for n in range(60)])
        assert est.window_max < 1.1
        assert est.roots[-1] < est.roots[10]

    def test_exponential(self):
        est = alpha_estimate([2**n for n in range(30)])
        assert abs(est.estimate - 2) < 1e-30

    def test_too_short(self):
        with pytest.raises(ValueError):
            alpha_estimate([1, 2, 3], window=5)

    @given(st.lists(coords, min_size=5, max_size=5).filter(any), st.integers(2, 30))
    def test_scaling_invariance(self, P, s):
        f = map_builtin("f4")
        a = orbit(f, P, 8)
        b = orbit(f, [s * c for c in P], 8)
        if len(a.heights) < 7:
            return
        assert alpha_estimate(a).roots == alpha_estimate(b).roots
