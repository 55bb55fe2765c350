"""Damped Newton for two equations in (a, b): a vectorized double-precision
sweep over many starts, then a multiprecision polish of each survivor."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from arithdeg.exactnum.bigfloat import context, default_prec, to_mp
from arithdeg.rationalmap import map_builtin
from arithdeg.vsolve.closure import COORD_POINTS, ClosureSystem


@dataclass
class ParamSolution:
    n: int | None
    target: int | None
    a: object
    b: object
    prec: int
    closure_residual: object
    distinct_margin: object = None
    avoid_margin: object = None
    line_margin: object = None
    points: list = field(default_factory=list)
    is_real: bool = False
    start: tuple = ()
    iterations: int = 0
    minpoly: dict = field(default_factory=dict)

    def approx(self) -> tuple[complex, complex]:
        return complex(self.a), complex(self.b)

    def to_json(self, digits: int | None = None) -> dict:
        import mpmath

        # enough digits to reload the values at the working precision
        digits = digits or int(self.prec * 0.30103) + 3

        def s(x):
            return mpmath.nstr(x, digits) if x is not None else None

        return {
            "n": self.n,
            "target": list(COORD_POINTS[self.target]) if self.target is not None else None,
            "target_index": self.target,
            "a": s(self.a),
            "b": s(self.b),
            "precision_bits": self.prec,
            "is_real": self.is_real,
            "residuals": {
                "closure": s(self.closure_residual),
                "distinctness_margin": s(self.distinct_margin),
                "indeterminacy_margin": s(self.avoid_margin),
                "contracted_line_margin": s(self.line_margin),
            },
            "minpoly": self.minpoly or None,
        }


class SolutionList(list):
    """List of solutions with solver diagnostics attached."""

    def __init__(self, items=(), diagnostics: dict | None = None):
        super().__init__(items)
        self.diagnostics = diagnostics or {}


def grid_starts(m: int = 25, box: float = 3.0, complex_samples: int = 0, seed: int = 0) -> list[tuple]:
    """``m x m`` real grid on ``[-box, box]^2`` (shifted off the axes), plus optional complex starts."""
    xs = np.linspace(-box, box, m) + box / (7.3 * m)
    starts: list[tuple] = [(complex(x), complex(y)) for x in xs for y in xs]
    if complex_samples:
        rng = np.random.default_rng(seed)
        z = rng.uniform(-box, box, (complex_samples, 4))
        starts += [(complex(r[0], r[1] / 4), complex(r[2], r[3] / 4)) for r in z]
    return starts


# ----------------------------------------------------------- chordal helpers


def chordal(ctx, P: Sequence, Q: Sequence):
    """Fubini-Study chordal distance ``|P ^ Q| / (|P| |Q|)``."""
    w = ctx.mpf(0)
    for i in range(len(P)):
        for j in range(i + 1, len(P)):
            w += abs(P[i] * Q[j] - P[j] * Q[i]) ** 2
    nP = ctx.sqrt(sum(abs(x) ** 2 for x in P))
    nQ = ctx.sqrt(sum(abs(x) ** 2 for x in Q))
    return ctx.sqrt(w) / (nP * nQ)


def _unit(ctx, P):
    s = max(abs(x) for x in P)
    return [x / s for x in P] if s else list(P)


def seed_orbit(ctx, a, b, k: int) -> list[list]:
    """``fiber^i(a:b:1)`` for ``i = 0..k`` by direct iteration of the map at ``(a, b)``.

    The list is shorter when the orbit lands exactly on an indeterminacy point.
    """
    f = map_builtin("fiber")
    coords = [_CoordEval(c) for c in f.coords]
    P = [a, b, ctx.mpf(1)]
    out = [P]
    for _ in range(k):
        img = [c(ctx, P, a, b) for c in coords]
        if not any(img):
            break
        P = _unit(ctx, img)
        out.append(P)
    return out


class _CoordEval:
    def __init__(self, p):
        self.terms = [(c, e) for e, c in p.items()]

    def __call__(self, ctx, P, a, b):
        vals = list(P) + [a, b]
        s = 0
        for c, e in self.terms:
            t = to_mp(ctx, c) if ctx is not None else float(c)
            for v, k in zip(vals, e):
                if k:
                    t = t * v**k
            s = s + t
        return s


def _line_margin(P):
    # distance-like measure from the contracted lines X=0, Y=0, Z=0
    nrm = sum(abs(x) ** 2 for x in P) ** 0.5
    return min(abs(x) for x in P) / nrm


def orbit_margins(ctx, sys: ClosureSystem, a, b):
    """Closure residual, pairwise distinctness, distance to the coordinate
    points and distance to the contracted coordinate lines."""
    pts = seed_orbit(ctx, a, b, sys.k)
    if len(pts) <= sys.k:
        z = ctx.mpf(0)
        return ctx.inf, z, z, z, pts
    residual = chordal(ctx, pts[-1], COORD_POINTS[sys.target])
    body = pts[:-1]
    distinct = min((chordal(ctx, body[i], body[j]) for i in range(len(body)) for j in range(i + 1, len(body))),
                   default=ctx.inf)
    avoid = min(chordal(ctx, P, e) for P in body for e in COORD_POINTS)
    lines = min(_line_margin(P) for P in body)
    return residual, distinct, avoid, lines, body


def _np_prefilter(sys: ClosureSystem, a: np.ndarray, b: np.ndarray, margin: float) -> np.ndarray:
    """Double-precision version of the orbit checks, used to skip hopeless polishes."""
    coords = [_CoordEval(c) for c in map_builtin("fiber").coords]
    P = [a, b, np.ones_like(a)]
    body = [P]
    ok = np.ones(len(a), dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(sys.k):
            img = [c(None, P, a, b) for c in coords]
            s = np.maximum.reduce([np.abs(x) for x in img])
            ok &= s > 0
            s = np.where(s > 0, s, 1.0)
            P = [x / s for x in img]
            body.append(P)
        last = body.pop()
        nrm = np.sqrt(sum(np.abs(x) ** 2 for x in last))
        ok &= np.sqrt(sum(np.abs(last[i]) ** 2 for i in range(3) if i != sys.target)) / nrm < 1e-6
        for i, Q in enumerate(body):
            nq = np.sqrt(sum(np.abs(x) ** 2 for x in Q))
            ok &= np.minimum.reduce([np.abs(x) for x in Q]) / nq > margin
            for R in body[:i]:
                nr = np.sqrt(sum(np.abs(x) ** 2 for x in R))
                w = sum(np.abs(Q[u] * R[v] - Q[v] * R[u]) ** 2 for u in range(3) for v in range(u + 1, 3))
                ok &= np.sqrt(w) / (nq * nr) > margin
    return ok & np.isfinite(nrm)


# --------------------------------------------------------------- coarse sweep


def _coarse(sys: ClosureSystem, starts: Sequence[tuple], iters: int, tol: float):
    a = np.array([complex(s[0]) for s in starts])
    b = np.array([complex(s[1]) for s in starts])
    mu = np.zeros(len(a))
    alive = np.ones(len(a), dtype=bool)
    F0, F1 = sys.np_residual(a, b)
    norm = np.sqrt(np.abs(F0) ** 2 + np.abs(F1) ** 2)
    rejected = 0
    with np.errstate(all="ignore"):
        for _ in range(iters):
            (j00, j01), (j10, j11) = sys.np_jacobian(a, b)
            # Levenberg-Marquardt form; mu = 0 is the plain Newton step
            h00 = np.abs(j00) ** 2 + np.abs(j10) ** 2 + mu
            h11 = np.abs(j01) ** 2 + np.abs(j11) ** 2 + mu
            h01 = np.conj(j00) * j01 + np.conj(j10) * j11
            g0 = np.conj(j00) * F0 + np.conj(j10) * F1
            g1 = np.conj(j01) * F0 + np.conj(j11) * F1
            det = h00 * h11 - np.abs(h01) ** 2
            da = -(h11 * g0 - h01 * g1) / det
            db = -(h00 * g1 - np.conj(h01) * g0) / det
            ok = np.isfinite(da) & np.isfinite(db) & (np.abs(det) > 0)
            na, nb = a + np.where(ok, da, 0), b + np.where(ok, db, 0)
            G0, G1 = sys.np_residual(na, nb)
            gnorm = np.sqrt(np.abs(G0) ** 2 + np.abs(G1) ** 2)
            better = ok & np.isfinite(gnorm) & (gnorm < norm) & alive
            done = norm <= 1e-15 * sys.np_scale(a, b)
            rejected += int(np.count_nonzero(alive & ~better & ~done))
            a, b = np.where(better, na, a), np.where(better, nb, b)
            F0, F1 = np.where(better, G0, F0), np.where(better, G1, F1)
            norm = np.where(better, gnorm, norm)
            scale = np.maximum(np.abs(h00) + np.abs(h11), 1e-300)
            mu = np.where(better, mu / 10, np.maximum(mu * 10, 1e-12 * scale))
            alive &= (np.abs(a) < 1e6) & (np.abs(b) < 1e6)
        rel = norm / np.maximum(sys.np_scale(a, b), 1e-300)
    good = alive & np.isfinite(rel) & (rel < tol)
    return a, b, good, rejected


# -------------------------------------------------------------------- polish


def _polish(ctx, sys: ClosureSystem, a, b, max_iter: int):
    stop = ctx.mpf(2) ** (-ctx.prec + 8)
    mu = ctx.mpf(0)
    F = sys.mp_residual(ctx, a, b)
    norm = ctx.sqrt(abs(F[0]) ** 2 + abs(F[1]) ** 2)
    for it in range(1, max_iter + 1):
        (j00, j01), (j10, j11) = sys.mp_jacobian(ctx, a, b)
        if mu:
            h00 = abs(j00) ** 2 + abs(j10) ** 2 + mu
            h11 = abs(j01) ** 2 + abs(j11) ** 2 + mu
            h01 = ctx.conj(j00) * j01 + ctx.conj(j10) * j11
            g0 = ctx.conj(j00) * F[0] + ctx.conj(j10) * F[1]
            g1 = ctx.conj(j01) * F[0] + ctx.conj(j11) * F[1]
            det = h00 * h11 - abs(h01) ** 2
            da, db = -(h11 * g0 - h01 * g1) / det, -(h00 * g1 - ctx.conj(h01) * g0) / det
        else:
            det = j00 * j11 - j01 * j10
            if det == 0:
                mu = ctx.mpf(2) ** (-ctx.prec // 2)
                continue
            da, db = -(j11 * F[0] - j01 * F[1]) / det, -(j00 * F[1] - j10 * F[0]) / det
        na, nb = a + da, b + db
        G = sys.mp_residual(ctx, na, nb)
        gnorm = ctx.sqrt(abs(G[0]) ** 2 + abs(G[1]) ** 2)
        if gnorm <= norm:
            a, b, F, norm = na, nb, G, gnorm
            mu = mu / 16 if mu > ctx.mpf(2) ** (-ctx.prec) else ctx.mpf(0)
            if abs(da) + abs(db) <= stop * (1 + abs(a) + abs(b)) or norm == 0:
                return a, b, it
        else:
            if abs(da) + abs(db) <= stop * (1 + abs(a) + abs(b)):
                return a, b, it
            mu = max(mu * 16, ctx.mpf(2) ** (-ctx.prec // 2))
    return a, b, max_iter


def _toy_residual(ctx, sys, a, b):
    F = sys.mp_residual(ctx, a, b)
    return max(abs(v) for v in F) / max(sys.mp_scale(ctx, a, b), ctx.mpf(1))


def solve_newton(sys: ClosureSystem, starts: Sequence[tuple], prec: int | None = None, *,
                 coarse_iters: int = 80, coarse_tol: float = 1e-9, polish_iters: int = 60,
                 dedupe: float = 1e-8, margin: float = 1e-8) -> SolutionList:
    """Solve ``sys`` from each start; return deduplicated, validated solutions.

    A solution is kept when its closure residual is below ``10^(-prec/4)``
    and, for closure systems, the orbit points ``p_4 .. p_n`` are pairwise
    at chordal distance above ``margin``, as far from the coordinate points,
    and off the contracted lines ``XYZ = 0`` (a point there reaches a
    coordinate point by contraction, not by closure).  Discarded candidates are counted by reason in ``diagnostics``.
    """
    if not starts:
        raise ValueError("need at least one start")
    prec = prec or default_prec()
    ctx = context(prec)
    a, b, good, rejected = _coarse(sys, starts, coarse_iters, coarse_tol)
    diag = {"starts": len(starts), "coarse_converged": int(good.sum()), "rejected_steps": rejected,
            "discarded": {}}
    if sys.is_closure:
        pre = _np_prefilter(sys, a, b, margin)
        diag["prefilter_rejected"] = int((good & ~pre).sum())
        good &= pre
    seen: list[tuple[complex, complex]] = []
    picked = []
    for i in np.flatnonzero(good):
        z = (complex(a[i]), complex(b[i]))
        if any(abs(z[0] - s[0]) + abs(z[1] - s[1]) < 1e-6 * (1 + abs(z[0]) + abs(z[1])) for s in seen):
            continue
        seen.append(z)
        picked.append((i, z))
    tol = ctx.mpf(10) ** (-ctx.mpf(prec) / 4)
    out: list[ParamSolution] = []

    def discard(reason: str):
        diag["discarded"][reason] = diag["discarded"].get(reason, 0) + 1

    for i, z in picked:
        pa, pb, its = _polish(ctx, sys, ctx.mpc(z[0]), ctx.mpc(z[1]), polish_iters)
        if any(abs(pa - s.a) + abs(pb - s.b) < dedupe for s in out):
            discard("duplicate after polish")
            continue
        real = abs(pa.imag) < tol * (1 + abs(pa)) and abs(pb.imag) < tol * (1 + abs(pb))
        if real:
            pa, pb = ctx.mpf(pa.real), ctx.mpf(pb.real)
        start = (complex(starts[i][0]), complex(starts[i][1]))
        if sys.is_closure:
            res, dist, avoid, lines, pts = orbit_margins(ctx, sys, pa, pb)
            if not res < tol:
                discard("closure residual")
                continue
            if not avoid > margin:
                discard("orbit meets a coordinate point")
                continue
            if not lines > margin:
                discard("orbit meets a contracted line")
                continue
            if not dist > margin:
                discard("orbit points not distinct")
                continue
            sol = ParamSolution(sys.n, sys.target, pa, pb, prec, res, dist, avoid, lines, pts, real, start, its)
        else:
            res = _toy_residual(ctx, sys, pa, pb)
            if not res < tol:
                discard("residual")
                continue
            sol = ParamSolution(None, None, pa, pb, prec, res, is_real=real, start=start, iterations=its)
        out.append(sol)
    out.sort(key=lambda s: (not s.is_real, float(abs(s.a)), float(abs(s.b))))
    diag["accepted"] = len(out)
    if not out:
        diag["status"] = "no start converged to an admissible solution"
    return SolutionList(out, diag)


def lift_minpoly(x, max_degree: int = 12, max_coeff: int = 10**12) -> list[int] | None:
    """Best-effort integer relation for a real value ``x`` (coefficients low to high)."""
    import mpmath

    ctx = mpmath.MPContext()
    ctx.prec = x.context.prec if hasattr(x, "context") else 256
    for d in range(1, max_degree + 1):
        rel = ctx.findpoly(ctx.mpf(x), d, maxcoeff=max_coeff)
        if rel:
            return list(reversed([int(c) for c in rel]))
    return None
