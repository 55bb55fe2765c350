"""Certification of the invariant cuspidal cubic and the attracting cusp."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from arithdeg.exactnum.algnum import AlgNum, algnum_embed
from arithdeg.exactnum.bigfloat import context, default_prec, to_mp
from arithdeg.exactnum.unipoly import Interval
from arithdeg.rationalmap import map_builtin
from arithdeg.vsolve.closure import COORD_POINTS
from arithdeg.vsolve.newton import ParamSolution, chordal

# exponents of X, Y, Z in the order the cubic coefficients are stored
CUBIC = ((3, 0, 0), (0, 3, 0), (0, 0, 3), (2, 1, 0), (2, 0, 1),
         (1, 2, 0), (0, 2, 1), (1, 0, 2), (0, 1, 2), (1, 1, 1))

STAGES = ("cubic_fit", "singular_point", "not_coordinate_point", "derivative", "invariance")


class CertificationError(RuntimeError):
    def __init__(self, stage: str, detail: str):
        super().__init__(f"certification failed at stage {stage!r}: {detail}")
        self.stage = stage
        self.detail = detail


@dataclass
class FixedPoint:
    x: object
    y: object
    undefined: bool = False


def fixed_point(a, b, prec: int | None = None) -> list[FixedPoint]:
    """Both roots of ``x^2 - (1+a+b) x + a = 0`` with ``y = x - a``.

    A root with ``x = 0`` (only when ``a = 0``) is returned flagged as
    undefined since the affine map divides by ``x`` there.

    >>> [(p.x, p.y) for p in fixed_point(0, 0, 53)]
    [(mpf('1.0'), mpf('1.0')), (mpf('0.0'), mpf('0.0'))]
    """
    ctx = context(prec or default_prec())
    a, b = (_num(ctx, v, ctx.prec) for v in (a, b))
    s = 1 + a + b
    disc = ctx.sqrt(s * s - 4 * a)
    out = []
    for x in ((s + disc) / 2, (s - disc) / 2):
        out.append(FixedPoint(x, x - a, bool(x == 0)))
    return out


def _num(ctx, v, prec):
    if isinstance(v, AlgNum):
        return algnum_embed(v, prec)
    return to_mp(ctx, v)


# ----------------------------------------------------------- cubic helpers


def _cubic_eval(C, P):
    return sum(c * P[0] ** e[0] * P[1] ** e[1] * P[2] ** e[2] for c, e in zip(C, CUBIC))


def _cubic_grad(C, P):
    out = [0, 0, 0]
    for c, e in zip(C, CUBIC):
        for i in range(3):
            if e[i]:
                d = list(e)
                d[i] -= 1
                out[i] += c * e[i] * P[0] ** d[0] * P[1] ** d[1] * P[2] ** d[2]
    return out


def _cubic_hess(C, P):
    H = [[0] * 3 for _ in range(3)]
    for c, e in zip(C, CUBIC):
        for i in range(3):
            for j in range(3):
                d = list(e)
                f = d[i]
                d[i] -= 1
                if d[i] < 0:
                    continue
                f *= d[j]
                d[j] -= 1
                if f == 0 or d[j] < 0:
                    continue
                H[i][j] += c * f * P[0] ** d[0] * P[1] ** d[1] * P[2] ** d[2]
    return H


def _unit3(ctx, P):
    n = ctx.sqrt(sum(abs(x) ** 2 for x in P))
    return [x / n for x in P]


class _AffineMap:
    """The fiber map at fixed ``(a, b)`` in the chart ``Z = 1``, with exact derivatives."""

    def __init__(self, ctx, a, b):
        f = map_builtin("fiber")
        self.ctx = ctx
        self.ab = (a, b)
        self.F = [_Compiled(c) for c in f.coords]
        self.dF = [[_Compiled(c.derivative(v)) for v in ("X", "Y")] for c in f.coords]

    def hom(self, x, y):
        P = (x, y, self.ctx.mpf(1))
        return [F(self.ctx, P, self.ab) for F in self.F]

    def __call__(self, x, y):
        F0, F1, F2 = self.hom(x, y)
        if F2 == 0:
            raise ZeroDivisionError("image leaves the affine chart")
        return F0 / F2, F1 / F2

    def jacobian(self, x, y):
        P = (x, y, self.ctx.mpf(1))
        F = [f(self.ctx, P, self.ab) for f in self.F]
        D = [[d(self.ctx, P, self.ab) for d in row] for row in self.dF]
        return [[(D[i][j] * F[2] - F[i] * D[2][j]) / F[2] ** 2 for j in range(2)] for i in range(2)]


class _Compiled:
    def __init__(self, p):
        self.terms = [(c, e) for e, c in p.items()]

    def __call__(self, ctx, P, ab):
        vals = tuple(P) + tuple(ab)
        s = ctx.mpf(0)
        for c, e in self.terms:
            t = to_mp(ctx, c)
            for v, k in zip(vals, e):
                if k:
                    t *= v**k
            s += t
        return s


def _eig2(ctx, M):
    tr = M[0][0] + M[1][1]
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    r = ctx.sqrt(tr * tr - 4 * det)
    lam = sorted([(tr + r) / 2, (tr - r) / 2], key=lambda z: -abs(z))
    return lam, tr, det


def _eigvec(ctx, M, lam):
    a, b = M[0][0] - lam, M[0][1]
    c, d = M[1][0], M[1][1] - lam
    v = (b, -a) if abs(a) + abs(b) >= abs(c) + abs(d) else (d, -c)
    n = ctx.sqrt(abs(v[0]) ** 2 + abs(v[1]) ** 2)
    return (v[0] / n, v[1] / n)


def _real(ctx, z, tol):
    if isinstance(z, type(ctx.mpc(0))) and abs(z.imag) <= tol * (1 + abs(z)):
        return ctx.mpf(z.real)
    return z


# --------------------------------------------------------------- certificate


@dataclass
class StageResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


@dataclass
class CuspCertificate:
    n: int
    stages: list
    cubic: list | None = None
    q: tuple | None = None
    eigvals: tuple | None = None
    jacobian: list | None = None
    delta_enclosure: Interval | None = None
    candidates: list = field(default_factory=list)
    contraction: dict | None = None
    prec: int = 0

    @property
    def passed(self) -> bool:
        return len(self.stages) == len(STAGES) and all(s.passed for s in self.stages)

    @property
    def failed_stage(self) -> str | None:
        return next((s.name for s in self.stages if not s.passed), None)

    def require(self) -> "CuspCertificate":
        if not self.passed:
            bad = self.failed_stage or STAGES[len(self.stages)]
            detail = next((s.detail for s in self.stages if s.name == bad), {})
            raise CertificationError(bad, str(detail))
        return self

    def to_json(self, digits: int = 30) -> dict:
        import mpmath

        def s(x):
            return mpmath.nstr(x, digits) if x is not None else None

        def clean(d):
            if isinstance(d, dict):
                return {k: clean(v) for k, v in d.items()}
            if isinstance(d, (list, tuple)):
                return [clean(v) for v in d]
            if hasattr(d, "_mpf_") or hasattr(d, "_mpc_"):
                return s(d)
            return d

        return {
            "status": "certified" if self.passed else f"failed:{self.failed_stage}",
            "stages": [{"name": st.name, "passed": st.passed, "detail": clean(st.detail)} for st in self.stages],
            "cubic": [s(c) for c in self.cubic] if self.cubic else None,
            "cubic_monomials": ["X^%dY^%dZ^%d" % e for e in CUBIC],
            "cusp": [s(v) for v in self.q] if self.q else None,
            "eigenvalues": [s(v) for v in self.eigvals] if self.eigvals else None,
            "delta_enclosure": [str(self.delta_enclosure.lo), str(self.delta_enclosure.hi)]
            if self.delta_enclosure else None,
            "fixed_point_candidates": clean(self.candidates),
            "contraction": clean(self.contraction),
            "precision_bits": self.prec,
        }


def _fit_cubic(ctx, pts, tol, gap_tol):
    rows = []
    for P in pts:
        U = _unit3(ctx, P)
        rows.append([U[0] ** e[0] * U[1] ** e[1] * U[2] ** e[2] for e in CUBIC])
    cplx = any(isinstance(x, type(ctx.mpc(0))) for r in rows for x in r)
    A = ctx.matrix(rows)
    if cplx:
        _, S, V = ctx.svd_c(A)
    else:
        _, S, V = ctx.svd_r(A)
    sv = sorted([S[i] for i in range(min(A.rows, A.cols))], reverse=True)
    # a missing singular value (fewer rows than columns) counts as zero
    sv += [ctx.mpf(0)] * (10 - len(sv))
    smax = sv[0]
    null = sum(1 for s in sv if s <= tol * smax)
    detail = {"singular_values": sv, "smallest_relative": sv[-1] / smax, "second_relative": sv[-2] / smax,
              "nullspace_dim": null}
    ok = null == 1 and sv[-2] > gap_tol * smax
    if not ok:
        return None, detail
    idx = min(range(len(S)), key=lambda i: abs(S[i]))
    C = [ctx.conj(V[idx, j]) if cplx else V[idx, j] for j in range(10)]
    # normalize: unit norm, largest coefficient real positive
    big = max(C, key=abs)
    phase = abs(big) / big
    nrm = ctx.sqrt(sum(abs(c) ** 2 for c in C))
    C = [_real(ctx, c * phase / nrm, tol) for c in C]
    detail["max_point_residual"] = max(abs(_cubic_eval(C, _unit3(ctx, P))) for P in pts)
    return C, detail


def _deflated_singular(ctx, C, x, y, iters: int = 80):
    """Gauss-Newton on ``c_x = c_y = 0, H v = 0`` in the chart ``Z = 1``.

    Augmenting the gradient equations with a kernel vector of the Hessian
    keeps the iteration regular at a cusp, where plain Newton on the gradient
    is singular and only converges linearly.
    """
    one = ctx.mpf(1)
    H = _cubic_hess(C, (x, y, one))
    # kernel of the (nearly rank one) affine Hessian, from its larger row
    if abs(H[0][0]) + abs(H[0][1]) >= abs(H[1][0]) + abs(H[1][1]):
        k0, k1 = -H[0][1], H[0][0]
    else:
        k0, k1 = -H[1][1], H[1][0]
    swap = abs(k1) > abs(k0)
    t = k0 / k1 if swap else (k1 / k0 if k0 else ctx.mpf(0))

    def residual(x, y, t):
        P = (x, y, one)
        g = _cubic_grad(C, P)
        H = _cubic_hess(C, P)
        v = (t, one) if swap else (one, t)
        return [g[0], g[1], H[0][0] * v[0] + H[0][1] * v[1], H[1][0] * v[0] + H[1][1] * v[1]]

    h = ctx.mpf(2) ** (-ctx.prec // 3)
    for _ in range(iters):
        F = residual(x, y, t)
        cols = []
        for k in range(3):
            z = [x, y, t]
            z[k] += h * (1 + abs(z[k]))
            Fp = residual(*z)
            z[k] -= 2 * h * (1 + abs([x, y, t][k]))
            Fm = residual(*z)
            cols.append([(Fp[i] - Fm[i]) / (2 * h * (1 + abs([x, y, t][k]))) for i in range(4)])
        J = ctx.matrix([[cols[k][i] for k in range(3)] for i in range(4)])
        Jh = J.H if hasattr(J, "H") else J.T
        try:
            step = ctx.lu_solve(Jh * J, Jh * ctx.matrix(F))
        except ZeroDivisionError:
            # not a cusp-like singularity; the candidate checks reject it
            break
        x, y, t = x - step[0], y - step[1], t - step[2]
        if abs(step[0]) + abs(step[1]) + abs(step[2]) < ctx.mpf(2) ** (-ctx.prec + 10) * (1 + abs(x) + abs(y)):
            break
    return x, y, t, swap


def certify_cusp(sol: ParamSolution, delta_enclosure: Interval, prec: int | None = None, *,
                 margin: float = 1e-8, gap_tol: float = 1e-10, eig_tol: float = 1e-8,
                 samples: int = 12) -> CuspCertificate:
    """Run the five certification stages; stop at the first failure.

    Stages: cubic through the ``n`` blown-up points, cusp at a fixed point,
    cusp off the coordinate points, derivative eigenvalues against
    ``delta^-2, delta^-3``, and invariance of the cubic near the cusp.
    """
    prec = prec or sol.prec
    ctx = context(prec)
    tol = ctx.mpf(10) ** (-ctx.mpf(prec) / 4)
    n = len(sol.points) + 3
    a, b = to_mp(ctx, sol.a), to_mp(ctx, sol.b)
    f = _AffineMap(ctx, a, b)
    cert = CuspCertificate(n, [], delta_enclosure=delta_enclosure, prec=prec)
    pts = [list(map(ctx.mpf, e)) for e in COORD_POINTS] + [[to_mp(ctx, c) for c in P] for P in sol.points]

    # (i) the cubic
    C, detail = _fit_cubic(ctx, pts, tol, gap_tol)
    cert.stages.append(StageResult("cubic_fit", C is not None, detail))
    if C is None:
        return cert
    cert.cubic = C

    # (ii) singular point of cusp type, fixed by f, off the blown-up points
    found = None
    for fp in fixed_point(a, b, prec):
        cand = {"x": fp.x, "y": fp.y, "undefined": fp.undefined}
        cert.candidates.append(cand)
        if fp.undefined:
            cand["reason"] = "x = 0"
            continue
        x, y, _, _ = _deflated_singular(ctx, C, fp.x, fp.y)
        P = _unit3(ctx, (x, y, ctx.mpf(1)))
        g = _cubic_grad(C, P)
        H = _cubic_hess(C, P)
        grad = max(abs(v) for v in g)
        hscale = max(abs(H[i][j]) for i in range(2) for j in range(2))
        disc = abs(H[0][0] * H[1][1] - H[0][1] * H[1][0]) / hscale**2 if hscale else ctx.inf
        try:
            fx, fy = f(x, y)
            moved = chordal(ctx, (fx, fy, 1), (x, y, 1))
        except ZeroDivisionError:
            moved = ctx.inf
        sep = min(chordal(ctx, (x, y, 1), Q) for Q in pts)
        cand.update({"singular_x": x, "singular_y": y, "gradient": grad, "on_curve": abs(_cubic_eval(C, P)),
                     "hessian_discriminant": disc, "hessian_scale": hscale, "fixed_residual": moved,
                     "distance_to_fixed_point": chordal(ctx, (x, y, 1), (fp.x, fp.y, 1)),
                     "distance_to_blown_up_points": sep})
        here = cand["distance_to_fixed_point"] < tol
        cusp = here and grad < tol and disc < tol and hscale > tol
        cand["cusp"] = bool(cusp)
        cand["fixed"] = bool(moved < tol)
        if cusp and moved < tol and sep > margin and found is None:
            found = (x, y)
    cert.stages.append(StageResult("singular_point", found is not None,
                                   {"candidates": len(cert.candidates),
                                    "cusps": sum(1 for c in cert.candidates if c.get("cusp"))}))
    if found is None:
        return cert
    x, y = (_real(ctx, v, tol) for v in found)
    cert.q = (x, y)

    # (iii) not one of the coordinate points
    dist = [chordal(ctx, (x, y, 1), e) for e in COORD_POINTS]
    cert.stages.append(StageResult("not_coordinate_point", min(dist) > margin, {"distances": dist}))
    if not min(dist) > margin:
        return cert

    # (iv) derivative eigenvalues against delta^-2 and delta^-3
    J = f.jacobian(x, y)
    (lp, lm), tr, det = _eig2(ctx, J)
    lp, lm = _real(ctx, lp, tol), _real(ctx, lm, tol)
    lo, hi = to_mp(ctx, delta_enclosure.lo), to_mp(ctx, delta_enclosure.hi)
    d = (lo + hi) / 2
    slack = 5 * (hi - lo)  # delta^-k has slope at most 3 on [1, 2]
    want = (d**-2, d**-3)
    errs = {"lambda_plus": abs(lp - want[0]), "lambda_minus": abs(lm - want[1]),
            "product": abs(lp * lm - d**-5), "ratio": abs(lp / lm - d)}
    ok = all(v < eig_tol + slack for v in errs.values())
    cert.eigvals, cert.jacobian = (lp, lm), J
    cert.stages.append(StageResult("derivative", ok, {"expected": want, "errors": errs, "trace": tr,
                                                       "determinant": det}))
    if not ok:
        return cert

    # (v) invariance of C near the cusp
    one = ctx.mpf(1)
    H = _cubic_hess(C, (x, y, one))
    h2 = [[H[0][0], H[0][1]], [H[1][0], H[1][1]]]
    w = _eigvec(ctx, h2, 0)  # tangent direction: kernel of the quadratic form
    perp = (-ctx.conj(w[1]), ctx.conj(w[0]))
    worst_on = worst_img = ctx.mpf(0)
    ratio_spread = ctx.mpf(0)
    ratios = []
    for j in range(samples):
        eps = ctx.mpf(10) ** (-1 - j % 4) * (1 if j % 2 == 0 else -1) * (1 + ctx.mpf(j) / samples)
        v = (w[0] + eps * perp[0], w[1] + eps * perp[1])
        Q = (h2[0][0] * v[0] ** 2 + 2 * h2[0][1] * v[0] * v[1] + h2[1][1] * v[1] ** 2) / 2
        K = _cubic_eval(C, (v[0], v[1], 0))
        if K == 0:
            continue
        t = -Q / K
        s = (x + t * v[0], y + t * v[1])
        Ps = _unit3(ctx, (s[0], s[1], one))
        on = abs(_cubic_eval(C, Ps))
        img = _unit3(ctx, f.hom(*s))
        worst_on = max(worst_on, on)
        worst_img = max(worst_img, abs(_cubic_eval(C, img)))
        # C(f(u)) / C(u) for u approaching the curve should settle, not blow up
        g = _cubic_grad(C, (s[0], s[1], one))
        nu = (ctx.conj(g[0]), ctx.conj(g[1]))
        rs = []
        for e in (10, 20, 30):
            hh = ctx.mpf(10) ** -e
            u = (s[0] + hh * nu[0], s[1] + hh * nu[1])
            Fu = f.hom(*u)
            rs.append(_cubic_eval(C, Fu) / _cubic_eval(C, (u[0], u[1], one)))
        ratios.append(rs[-1])
        ratio_spread = max(ratio_spread, abs(rs[0] - rs[-1]) / (1 + abs(rs[-1])))
    ok = bool(worst_on < tol and worst_img < tol and ratio_spread < ctx.mpf(10) ** -6 and ratios)
    cert.stages.append(StageResult("invariance", ok, {
        "samples": len(ratios), "max_sample_residual": worst_on, "max_image_residual": worst_img,
        "ratio_spread": ratio_spread, "max_abs_ratio": max((abs(r) for r in ratios), default=None)}))
    return cert


# ---------------------------------------------------------------- basin


@dataclass
class BasinReport:
    radius: object
    samples: int
    max_ratio: object
    max_chordal_ratio: object
    max_chordal_ratio_after: object
    steps: int
    passed: bool
    metric: str = "adapted"
    witness: tuple | None = None
    reason: str = ""
    dominant_eigenvalue: object = None

    def to_json(self, digits: int = 20) -> dict:
        import mpmath

        def s(x):
            return mpmath.nstr(x, digits) if x is not None else None

        return {
            "radius": s(self.radius), "samples": self.samples, "metric": self.metric,
            "max_ratio": s(self.max_ratio), "max_chordal_ratio": s(self.max_chordal_ratio),
            "max_chordal_ratio_after_steps": s(self.max_chordal_ratio_after), "steps": self.steps,
            "passed": self.passed, "dominant_eigenvalue": s(self.dominant_eigenvalue),
            "witness": [s(v) for v in self.witness] if self.witness else None, "reason": self.reason,
        }


def basin_check(sol: ParamSolution, cert: CuspCertificate, radius, samples: int = 200, *,
                steps: int = 20, seed: int = 0, prec: int | None = None) -> BasinReport:
    """Sampled contraction of ``f`` towards the cusp ``q``.

    Distances are measured in the eigenbasis of ``Df(q)``: ``d(u, q) =
    |V^-1 (u - q)|`` in the chart ``Z = 1``. This norm is equivalent to the
    chordal metric near ``q`` and makes one step contract by about the
    dominant eigenvalue. The chordal one-step ratio and the chordal ratio
    after ``steps`` iterations are reported alongside.
    """
    if cert.q is None or cert.jacobian is None:
        raise ValueError("basin check needs a certificate with a cusp and its derivative")
    prec = prec or min(sol.prec, 128)
    ctx = context(prec)
    a, b = to_mp(ctx, sol.a), to_mp(ctx, sol.b)
    f = _AffineMap(ctx, a, b)
    qx, qy = (to_mp(ctx, v) for v in cert.q)
    J = [[to_mp(ctx, v) for v in row] for row in cert.jacobian]
    (l1, l2), _, _ = _eig2(ctx, J)
    v1, v2 = _eigvec(ctx, J, l1), _eigvec(ctx, J, l2)
    det = v1[0] * v2[1] - v2[0] * v1[1]
    inv = [[v2[1] / det, -v2[0] / det], [-v1[1] / det, v1[0] / det]]
    r = to_mp(ctx, Fraction(radius) if isinstance(radius, str) else radius)

    def adapted(x, y):
        dx, dy = x - qx, y - qy
        return ctx.sqrt(abs(inv[0][0] * dx + inv[0][1] * dy) ** 2 + abs(inv[1][0] * dx + inv[1][1] * dy) ** 2)

    rng = random.Random(seed)
    worst = worst_ch = worst_after = ctx.mpf(0)
    q3 = (qx, qy, 1)
    for _ in range(samples):
        g = [rng.gauss(0, 1) for _ in range(4)]
        gn = sum(t * t for t in g) ** 0.5
        rho = r * ctx.mpf(rng.random()) ** 0.25
        if rho == 0:
            continue
        z = (ctx.mpc(g[0], g[1]) * rho / gn, ctx.mpc(g[2], g[3]) * rho / gn)
        x = qx + v1[0] * z[0] + v2[0] * z[1]
        y = qy + v1[1] * z[0] + v2[1] * z[1]
        d0 = adapted(x, y)
        c0 = chordal(ctx, (x, y, 1), q3)
        cur, prev = (x, y), d0
        for k in range(steps):
            try:
                nxt = f(*cur)
            except ZeroDivisionError:
                return BasinReport(r, samples, worst, worst_ch, worst_after, steps, False, witness=(x, y),
                                   reason=f"orbit left the chart at step {k + 1}", dominant_eigenvalue=abs(l1))
            dk = adapted(*nxt)
            if k == 0:
                worst = max(worst, dk / d0)
                worst_ch = max(worst_ch, chordal(ctx, (nxt[0], nxt[1], 1), q3) / c0)
            if dk > r or dk >= prev:
                return BasinReport(r, samples, max(worst, dk / prev), worst_ch, worst_after, steps, False,
                                   witness=(x, y), reason=f"no contraction at step {k + 1}",
                                   dominant_eigenvalue=abs(l1))
            if min(chordal(ctx, (nxt[0], nxt[1], 1), e) for e in COORD_POINTS) == 0:
                return BasinReport(r, samples, worst, worst_ch, worst_after, steps, False, witness=(x, y),
                                   reason=f"orbit met indeterminacy at step {k + 1}", dominant_eigenvalue=abs(l1))
            cur, prev = nxt, dk
        worst_after = max(worst_after, chordal(ctx, (cur[0], cur[1], 1), q3) / c0)
    ok = worst < 1
    return BasinReport(r, samples, worst, worst_ch, worst_after, steps, bool(ok),
                       reason="" if ok else "ratio >= 1", dominant_eigenvalue=abs(l1))


def choose_radius(sol: ParamSolution, cert: CuspCertificate, start=Fraction(1, 100), shrink: int = 10,
                  rounds: int = 8, **kw) -> BasinReport:
    """Shrink the radius until :func:`basin_check` passes (or give up)."""
    r = Fraction(start)
    rep = None
    for _ in range(rounds):
        rep = basin_check(sol, cert, r, **kw)
        if rep.passed:
            return rep
        r /= shrink
    return rep


# ------------------------------------------------------------ negative control


def closure_control(a, b, ks: Sequence[int] = range(7, 18), prec: int = 256) -> dict:
    """Exact orbit of ``(a:b:1)`` for a rational ``(a, b)``: which ``k`` and targets close."""
    from arithdeg.heightlab import orbit

    a, b = Fraction(a), Fraction(b)
    f = map_builtin("fiber", {"a": a, "b": b})
    rec = orbit(f, (a, b, 1), max(ks))
    ctx = context(prec)
    tol = ctx.mpf(10) ** (-ctx.mpf(prec) / 4)
    rows = []
    for k in ks:
        if k >= len(rec.points):
            rows.append({"k": k, "closes": None, "reason": rec.describe_stop()})
            continue
        P = [ctx.mpf(c) for c in rec.points[k].coords]
        res = [chordal(ctx, P, e) for e in COORD_POINTS]
        exact = [all(rec.points[k].coords[i] == 0 for i in range(3) if i != t) for t in range(3)]
        rows.append({"k": k, "residuals": res, "closes": any(exact) or any(r_ < tol for r_ in res)})
    return {"a": str(a), "b": str(b), "rows": rows, "stop": rec.describe_stop(),
            "any_closure": any(r_["closes"] for r_ in rows if r_["closes"] is not None)}
