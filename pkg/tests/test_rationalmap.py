import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from arithdeg.multipoly import MultiPoly, mp_eval, mp_parse
from arithdeg.rationalmap import (Limits, degree_sequence, identity_map, indeterminacy_check, jacobian_det,
                                  map_apply, map_builtin, map_compose, map_from_json, map_normalize, map_to_json,
                                  resolve_map, restriction_check, specialize)

rats = st.fractions(min_value=-20, max_value=20, max_denominator=20)


def proportional(P, Q):
    return all(P[i] * Q[j] == P[j] * Q[i] for i in range(len(P)) for j in range(len(P)))


class TestBuiltins:
    def test_f4(self):
        assert map_apply(map_builtin("f4"), [1, 1, 1, 1, 1]) == [2, 2, 1, 1, 1]

    def test_fiber_affine(self):
        assert map_apply(map_builtin("fiber", {"a": 1, "b": 1}), [1, 1, 1]) == [2, 2, 1]

    @given(rats.filter(bool), rats.filter(bool), rats, rats)
    def test_fiber_is_homogenized_affine_map(self, x, y, a, b):
        img = map_apply(map_builtin("fiber", {"a": a, "b": b}), [x, y, 1])
        assert proportional(img, [y + a, y / x + b, 1])

    def test_g5(self):
        assert map_apply(map_builtin("g5"), [1, 1, 1, 1, 1, 0]) == [2, 2, 1, 1, 1, 0]

    def test_errors(self):
        with pytest.raises(ValueError):
            map_builtin("h7")
        with pytest.raises(ValueError):
            map_builtin("f4", {"a": 1})


class TestNormalize:
    def test_common_factor(self):
        vs = map_builtin("fiber").varset
        f = map_normalize([mp_parse(t, vs) for t in ("X^2*Y", "X^2*Z", "X^3")])
        assert [str(c) for c in f.coords] == ["Y", "Z", "X"]

    def test_coprime_unchanged(self):
        vs = map_builtin("fiber").varset
        coords = [mp_parse(t, vs) for t in ("X*Y", "X*Z", "Y*Z")]
        assert list(map_normalize(coords).coords) == coords

    def test_all_zero(self):
        vs = map_builtin("fiber").varset
        with pytest.raises(ValueError):
            map_normalize([MultiPoly(vs)] * 3)


class TestCompose:
    def test_identity(self):
        for name in ("f4", "fiber", "g5"):
            f = map_builtin(name)
            e = identity_map(f.varset)
            assert map_compose(e, f) == f
            assert map_compose(f, e) == f

    def test_fiber_square(self):
        f = map_builtin("fiber")
        raw = map_compose(f, f, normalize=False)
        sq = map_compose(f, f)
        assert raw.degree == 4
        # sympy: the raw square has common factor X*Z
        assert sq.degree == 2
        for c_raw, c in zip(raw.coords, sq.coords):
            assert c * mp_parse("X*Z", f.varset) == c_raw or c.scale(-1) * mp_parse("X*Z", f.varset) == c_raw

    def test_f4_square(self):
        # sympy: gcd of the raw square is X, so the degree drops from 4 to 3
        assert map_compose(map_builtin("f4"), map_builtin("f4")).degree == 3

    @given(rats, rats, st.lists(rats, min_size=3, max_size=3))
    def test_compose_agrees_with_iteration(self, a, b, P):
        f = map_builtin("fiber", {"a": a, "b": b})
        img = map_apply(f, P)
        if all(v == 0 for v in img) or all(v == 0 for v in map_apply(f, img)):
            return
        assert proportional(map_apply(map_compose(f, f), P), map_apply(f, img))


class TestDegreeSequence:
    def test_identity(self):
        assert degree_sequence(identity_map(map_builtin("fiber").varset), 5).degs == [1] * 5

    def test_fiber_k1(self):
        assert degree_sequence(map_builtin("fiber"), 1).degs == [2]

    def test_fiber_symbolic_prefix(self):
        seq = degree_sequence(map_builtin("fiber"), 6)
        assert seq.degs == [2, 2, 3, 4, 5, 7]
        assert seq.is_submultiplicative()

    def test_specialized_fiber(self):
        seq = degree_sequence(map_builtin("fiber", {"a": Fraction(3, 7), "b": Fraction(-5, 11)}), 12)
        assert seq.degs == [2, 2, 3, 4, 5, 7, 9, 12, 16, 21, 28, 37]
        assert seq.is_submultiplicative()
        assert seq.recurrence_holds((2, 3), 3)
        assert abs(float(seq.growth_diagnostic()) - 1.32472) / 1.32472 < 0.02

    def test_f4(self):
        seq = degree_sequence(map_builtin("f4"), 7)
        assert seq.degs == [2, 3, 5, 7, 10, 14, 19]
        assert seq.is_submultiplicative()

    def test_truncation(self):
        seq = degree_sequence(map_builtin("fiber"), 12, Limits(max_ops=10_000))
        assert seq.truncated and seq.reason
        assert len(seq.degs) < 12


class TestIndeterminacy:
    def test_fiber(self):
        f = map_builtin("fiber", {"a": 1, "b": 1})
        assert indeterminacy_check(f, [0, 0, 1])
        assert indeterminacy_check(f, [1, 0, 0])
        assert indeterminacy_check(f, [0, 1, 0])
        assert not indeterminacy_check(f, [1, 1, 1])

    @given(rats, rats)
    def test_f4_line(self, a, b):
        assert indeterminacy_check(map_builtin("f4"), [0, 1, 0, a, b])


class TestJacobian:
    def test_identity(self):
        assert jacobian_det(identity_map(map_builtin("fiber").varset)).is_constant()

    def test_fiber(self):
        f = map_builtin("fiber")
        # sympy: det = 2*X*Y*Z
        assert jacobian_det(f) == mp_parse("2*X*Y*Z", f.varset)

    def test_chain_rule(self):
        f = map_builtin("fiber", {"a": Fraction(2, 3), "b": Fraction(-1, 5)})
        f2 = map_compose(f, f, normalize=False)
        Jf, Jf2 = jacobian_det(f), jacobian_det(f2)
        names = f.varset.proj_vars
        rng = random.Random(3)
        for _ in range(10):
            P = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(3)]
            img = map_apply(f, P)
            lhs = mp_eval(Jf2, dict(zip(names, P)))
            rhs = mp_eval(Jf, dict(zip(names, img))) * mp_eval(Jf, dict(zip(names, P)))
            assert lhs == rhs


class TestRestriction:
    def test_hyperplane(self):
        rep = restriction_check(100, seed=7)
        assert rep.passed and rep.invariant == rep.matches == 100


class TestMapFiles:
    def test_round_trip(self):
        for name in ("f4", "fiber", "g5"):
            f = map_builtin(name)
            assert map_from_json(json.loads(json.dumps(map_to_json(f)))) == f

    def test_rational_params(self):
        data = {"dim": 2, "proj_vars": ["X", "Y", "Z"], "param_vars": ["a", "b"],
                "coords": ["X*Y + a*X*Z", "Y*Z + b*X*Z", "X*Z"], "params": {"a": {"rat": "1"}, "b": {"rat": "1"}}}
        assert map_apply(map_from_json(data), [1, 1, 1]) == [2, 2, 1]

    def test_resolve(self, tmp_path):
        assert resolve_map("builtin:f4") == map_builtin("f4")
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"builtin": "fiber"}))
        assert resolve_map(str(path), {"a": Fraction(1), "b": Fraction(1)}) == specialize(
            map_builtin("fiber"), {"a": Fraction(1), "b": Fraction(1)})
