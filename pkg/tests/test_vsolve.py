import random
from fractions import Fraction

import pytest

from arithdeg.exactnum import context
from arithdeg.multipoly import mp_parse
from arithdeg.rationalmap import jacobian_det, map_apply, map_builtin
from arithdeg.spectral import delta
from arithdeg.vsolve import (STAGES, ParamSolution, basin_check, certify_cusp, chordal, closure_control, closure_system,
                             elimination_poly, fixed_point, orbit_polys, seed_orbit, solve_newton, system_from_polys)

VS = map_builtin("fiber").varset
# frozen from a 256-bit run of the pipeline; cross-checked by the resultant sign change below
A10 = "0.4994965097426465012646938460238248078432750527325369217552219421561654825352"
B10 = "-0.08373582297594297272080482719919753414584239541924517554051924600604899198375"


def P(text):
    return mp_parse(text, VS)


class TestOrbitPolys:
    def test_seed_and_first_step(self):
        orb = orbit_polys(1)
        assert orb.point(0) == (P("a"), P("b"), P("1"))
        # sympy: fiber(a:b:1) = [a(a+b) : b(a+1) : a]
        assert orb.point(1) == (P("a^2 + a*b"), P("a*b + b"), P("a"))

    def test_seed_is_image_of_contracted_line(self):
        f = map_builtin("fiber", {"a": Fraction(2, 3), "b": Fraction(5, 7)})
        assert jacobian_det(map_builtin("fiber")) == P("2*X*Y*Z")
        for x in (1, 2, -3):
            img = map_apply(f, [x, 0, 1])
            assert img[0] * 1 == img[2] * Fraction(2, 3) and img[1] * 1 == img[2] * Fraction(5, 7)

    def test_degrees_submultiplicative(self):
        d = orbit_polys(7).degrees()
        assert d == [2, 3, 5, 7, 10, 14, 17]
        assert all(d[i + j + 1] <= d[i] * d[j] for i in range(len(d)) for j in range(len(d) - i - 1))
        assert all(x <= y for x, y in zip(d, d[1:]))

    def test_matches_direct_iteration(self):
        ctx = context(128)
        a, b = ctx.mpf(3) / 7, ctx.mpf(-5) / 11
        direct = seed_orbit(ctx, a, b, 5)
        orb = orbit_polys(5)
        for i in range(1, 6):
            vals = [sum(ctx.mpf(c.numerator) / c.denominator * a ** e[3] * b ** e[4]
                        for e, c in coord.exps_dict().items()) for coord in orb.point(i)]
            assert chordal(ctx, vals, direct[i]) < 1e-30


class TestClosureSystem:
    def test_target_equations(self):
        sys = closure_system(10, 2)
        Pk = orbit_polys(7).point(7)
        assert sys.eqs == (Pk[0], Pk[1])
        assert sys.k == 7

    def test_errors(self):
        with pytest.raises(ValueError):
            closure_system(9, 2)
        with pytest.raises(ValueError):
            closure_system(10, 3)


class TestNewton:
    def test_toy(self):
        sols = solve_newton(system_from_polys([P("a^2 - 2"), P("b - 1")]), [(1.4, 0.9)], 256)
        assert len(sols) == 1
        ctx = context(256)
        assert abs(sols[0].a - ctx.sqrt(2)) < ctx.mpf(10) ** -70
        assert sols[0].b == 1 and sols[0].is_real

    def test_degenerate_start(self):
        # the Jacobian is singular at a = 0; the solver damps and either converges or fails cleanly
        sols = solve_newton(system_from_polys([P("a^2 - 2"), P("b - 1")]), [(0.0, 5.0)], 128)
        assert sols.diagnostics["rejected_steps"] > 0 or len(sols) == 1
        for s in sols:
            assert abs(abs(s.a) - 2 ** 0.5) < 1e-20

    def test_dedupe(self):
        sols = solve_newton(system_from_polys([P("a^2 - 2"), P("b - 1")]), [(1.4, 0.9), (1.41, 1.1), (-1.4, 1)], 128)
        assert len(sols) == 2

    def test_restart_from_frozen_values(self):
        sols = solve_newton(closure_system(10, 2), [(float(A10), float(B10))], 256)
        assert len(sols) == 1
        s = sols[0]
        ctx = context(256)
        assert abs(s.a - ctx.mpf(A10)) < 1e-70 and abs(s.b - ctx.mpf(B10)) < 1e-70
        assert s.closure_residual < ctx.mpf(10) ** -64
        assert s.distinct_margin > 1e-8 and s.avoid_margin > 1e-8 and len(s.points) == 7


class TestFixedPoint:
    def test_zero_params(self):
        pts = fixed_point(0, 0, 64)
        assert sorted((float(p.x), float(p.y)) for p in pts) == [(0.0, 0.0), (1.0, 1.0)]
        assert [p.undefined for p in pts if p.x == 0] == [True]

    def test_unit_params(self):
        ctx = context(128)
        xs = sorted(float(p.x) for p in fixed_point(1, 1, 128))
        assert abs(xs[0] - (3 - 5 ** 0.5) / 2) < 1e-15 and abs(xs[1] - (3 + 5 ** 0.5) / 2) < 1e-15
        for p in fixed_point(1, 1, 128):
            assert abs(p.y - (p.x - 1)) < ctx.mpf(10) ** -35
            assert abs(p.y + 1 - p.x) < 1e-30 and abs(p.y / p.x + 1 - p.y) < 1e-30


class TestElimination:
    def test_sign_change_at_a10(self):
        R = elimination_poly(closure_system(10, 2))
        a = Fraction(A10)
        eps = Fraction(1, 10**40)
        assert R.sign_at(a - eps) * R.sign_at(a + eps) < 0

    def test_limited_to_small_n(self):
        with pytest.raises(ValueError):
            elimination_poly(closure_system(13, 2))


class TestNegativeControl:
    def test_random_rationals_never_close(self):
        rng = random.Random(5)
        for _ in range(3):
            a = Fraction(rng.randint(-50, 50), rng.randint(1, 30))
            b = Fraction(rng.randint(-50, 50), rng.randint(1, 30))
            rep = closure_control(a, b, range(7, 18))
            assert not rep["any_closure"], rep

    def test_random_params_have_no_cubic(self):
        ctx = context(256)
        a, b = ctx.mpf(3) / 7, ctx.mpf(-5) / 11
        sol = ParamSolution(10, 2, a, b, 256, ctx.mpf(1), points=seed_orbit(ctx, a, b, 7)[:-1])
        cert = certify_cusp(sol, delta(10, Fraction(1, 10**40)), 256)
        assert cert.failed_stage == "cubic_fit"
        assert cert.stages[0].detail["nullspace_dim"] == 0


class TestPipelineN10:
    def test_solution(self, report10):
        sol = report10.solution
        ctx = context(256)
        assert sol.target == 2 and sol.is_real
        assert abs(sol.a - ctx.mpf(A10)) < 1e-70 and abs(sol.b - ctx.mpf(B10)) < 1e-70
        assert sol.closure_residual < ctx.mpf(10) ** -64

    def test_certificate(self, report10):
        cert = report10.certificate
        assert cert.passed and [s.name for s in cert.stages] == list(STAGES)
        ctx = context(256)
        d = ctx.mpf(report10.delta_enclosure.mid.numerator) / report10.delta_enclosure.mid.denominator
        l1, l2 = sorted((abs(v) for v in cert.eigvals), reverse=True)
        assert abs(l1 - d**-2) < 1e-8 and abs(l2 - d**-3) < 1e-8
        assert abs(l1 * l2 - d**-5) < 1e-8 and abs(l1 / l2 - d) < 1e-8

    def test_exactly_one_cusp_candidate(self, report10):
        cusps = [c for c in report10.certificate.candidates if c.get("cusp")]
        assert len(cusps) == 1

    def test_basin(self, report10):
        rep = report10.basin
        assert rep.passed and rep.max_ratio < 1
        assert abs(float(rep.dominant_eigenvalue) - 0.722733141380863) < 1e-12

    def test_basin_ratio_tends_to_dominant_eigenvalue(self, report10):
        sol, cert = report10.solution, report10.certificate
        wide = basin_check(sol, cert, Fraction(1, 100), samples=60)
        tight = basin_check(sol, cert, Fraction(1, 10**6), samples=60)
        lam = tight.dominant_eigenvalue
        assert tight.passed
        assert abs(tight.max_ratio - lam) < abs(wide.max_ratio - lam) + 1e-12
        assert abs(tight.max_ratio - lam) < 1e-3

    def test_json_fields(self, report10):
        out = report10.to_json()
        for key in ("n", "target", "a", "b", "precision_bits", "residuals", "eigenvalues", "delta_enclosure",
                    "certificate_status"):
            assert key in out
        assert out["certificate_status"] == "certified" and out["target"] == [0, 0, 1]
