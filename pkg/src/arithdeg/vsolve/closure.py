"""Orbit-closure equations for the fiber family in the parameters (a, b).

The seed ``(a:b:1)`` is pushed forward by the generic fiber map with exact
polynomial coordinates in ``Q[a, b]``; common factors are cancelled after
every step.  Requiring the ``k``-th point to be a coordinate point gives two
equations in ``a, b``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Sequence

import numpy as np

from arithdeg.exactnum.unipoly import UniPoly
from arithdeg.multipoly import MultiPoly
from arithdeg.multipoly.evaluate import substitute_many
from arithdeg.multipoly.gcd import mp_gcd_many_cofactors
from arithdeg.rationalmap import ResourceLimitError, map_builtin

PARAMS = ("a", "b")
COORD_POINTS = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


@dataclass
class OrbitPolys:
    """``points[i - 1]`` holds the coordinates of ``fiber^i(a:b:1)``."""

    seed: tuple
    points: list = field(default_factory=list)
    truncated: bool = False
    reason: str = ""

    def point(self, i: int) -> tuple:
        return self.seed if i == 0 else self.points[i - 1]

    def degrees(self) -> list[int]:
        return [max(c.total_degree() for c in P if not c.is_zero()) for P in self.points]


def _primitive_triple(P: Sequence[MultiPoly]) -> tuple:
    nz = [c for c in P if not c.is_zero()]
    fr = [Fraction(v) for c in nz for _, v in c.items()]
    den = reduce(lcm, (v.denominator for v in fr), 1)
    num = reduce(gcd, (abs(int(v * den)) for v in fr), 0)
    scale = Fraction(den, num)
    if nz[0].leading_coeff < 0:
        scale = -scale
    return tuple(c.scale(scale) for c in P)


_cache: dict[str, OrbitPolys] = {}


def orbit_polys(k: int, max_terms: int = 200_000) -> OrbitPolys:
    """Exact orbit of the seed for ``k`` steps (cached and extended on demand).

    Stops with ``truncated=True`` once one point would need more than
    ``max_terms`` terms in total.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    f = map_builtin("fiber")
    vs = f.varset
    a, b = MultiPoly.var(vs, "a"), MultiPoly.var(vs, "b")
    key = "fiber"
    orb = _cache.get(key)
    if orb is None:
        orb = _cache[key] = OrbitPolys((a, b, MultiPoly.const(vs, 1)))
    result = OrbitPolys(orb.seed, orb.points[:k])
    while len(result.points) < k:
        cur = result.point(len(result.points))
        if sum(len(c) for c in cur) > max_terms:
            result.truncated, result.reason = True, f"term limit {max_terms} at step {len(result.points)}"
            return result
        img = substitute_many(f.coords, list(cur) + [a, b])
        if all(c.is_zero() for c in img):
            result.truncated, result.reason = True, f"seed orbit hits indeterminacy at step {len(result.points)}"
            return result
        g, cof = mp_gcd_many_cofactors(img)
        nxt = _primitive_triple(cof if not g.is_constant() else img)
        result.points.append(nxt)
        if len(orb.points) < len(result.points):
            orb.points.append(nxt)
    return result


# ------------------------------------------------------------------ systems


class PolyEval:
    """A polynomial in ``a, b`` compiled for repeated numeric evaluation."""

    def __init__(self, p: MultiPoly, names: Sequence[str] = PARAMS):
        ia, ib = (p.varset.index(n) for n in names)
        others = [i for i in range(p.varset.nvars) if i not in (ia, ib)]
        self.coeffs: list = []
        self.ea: list[int] = []
        self.eb: list[int] = []
        for e, c in p.items():
            if any(e[i] for i in others):
                raise ValueError(f"polynomial involves variables other than {tuple(names)}")
            self.coeffs.append(c)
            self.ea.append(e[ia])
            self.eb.append(e[ib])
        self.deg_a = max(self.ea, default=0)
        self.deg_b = max(self.eb, default=0)
        self._fc = np.array([float(c) for c in self.coeffs]) if self.coeffs else np.zeros(0)

    def np_eval(self, a: np.ndarray, b: np.ndarray, absolute: bool = False) -> np.ndarray:
        if not self.coeffs:
            return np.zeros_like(a)
        if absolute:
            a, b = np.abs(a), np.abs(b)
        pa = np.ones((self.deg_a + 1,) + a.shape, dtype=a.dtype)
        pb = np.ones((self.deg_b + 1,) + b.shape, dtype=b.dtype)
        for e in range(1, self.deg_a + 1):
            pa[e] = pa[e - 1] * a
        for e in range(1, self.deg_b + 1):
            pb[e] = pb[e - 1] * b
        c = np.abs(self._fc) if absolute else self._fc
        return np.tensordot(c, pa[self.ea] * pb[self.eb], axes=1)

    def mp_eval(self, ctx, a, b, absolute: bool = False):
        if absolute:
            a, b = abs(a), abs(b)
        pa = [ctx.mpf(1)]
        pb = [ctx.mpf(1)]
        for _ in range(self.deg_a):
            pa.append(pa[-1] * a)
        for _ in range(self.deg_b):
            pb.append(pb[-1] * b)
        s = ctx.mpf(0)
        for c, i, j in zip(self.coeffs, self.ea, self.eb):
            cc = ctx.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else ctx.mpf(c)
            s += (abs(cc) if absolute else cc) * pa[i] * pb[j]
        return s


@dataclass
class ClosureSystem:
    """Two equations in ``a, b``; for closure systems also the data behind them."""

    eqs: tuple
    n: int | None = None
    k: int | None = None
    target: int | None = None
    orbit: OrbitPolys | None = None
    label: str = ""

    def __post_init__(self):
        self.eqs = tuple(self.eqs)
        if len(self.eqs) != 2:
            raise ValueError("a system needs exactly two equations")
        self._f = [PolyEval(e) for e in self.eqs]
        self._j = [[PolyEval(e.derivative(v)) for v in PARAMS] for e in self.eqs]

    @property
    def is_closure(self) -> bool:
        return self.target is not None

    def np_residual(self, a, b):
        return [f.np_eval(a, b) for f in self._f]

    def np_jacobian(self, a, b):
        return [[d.np_eval(a, b) for d in row] for row in self._j]

    def np_scale(self, a, b):
        return sum(f.np_eval(a, b, absolute=True) for f in self._f)

    def mp_residual(self, ctx, a, b):
        return [f.mp_eval(ctx, a, b) for f in self._f]

    def mp_jacobian(self, ctx, a, b):
        return [[d.mp_eval(ctx, a, b) for d in row] for row in self._j]

    def mp_scale(self, ctx, a, b):
        return sum(f.mp_eval(ctx, a, b, absolute=True) for f in self._f)

    def degrees(self) -> tuple[int, int]:
        return tuple(e.total_degree() for e in self.eqs)


def closure_system(n: int, target: int, max_terms: int = 200_000) -> ClosureSystem:
    """Equations for ``fiber^(n-3)(a:b:1) = e_target``: the two other coordinates vanish."""
    if n < 10:
        raise ValueError("closure systems are defined for n >= 10")
    if target not in (0, 1, 2):
        raise ValueError("target must be 0, 1 or 2")
    k = n - 3
    orb = orbit_polys(k, max_terms)
    if orb.truncated:
        raise ResourceLimitError(f"orbit polynomials truncated: {orb.reason}")
    P = orb.point(k)
    eqs = tuple(P[i] for i in range(3) if i != target)
    return ClosureSystem(eqs, n, k, target, orb, f"n={n} target={COORD_POINTS[target]}")


def system_from_polys(eqs: Sequence[MultiPoly], label: str = "") -> ClosureSystem:
    """Wrap two arbitrary polynomials in ``a, b`` (no orbit invariants are checked)."""
    return ClosureSystem(tuple(eqs), label=label)


# -------------------------------------------------------- resultant oracle


def _bareiss_det(M: list[list[int]]) -> int:
    M = [row[:] for row in M]
    n = len(M)
    sign, prev = 1, 1
    for i in range(n - 1):
        if M[i][i] == 0:
            piv = next((r for r in range(i + 1, n) if M[r][i]), None)
            if piv is None:
                return 0
            M[i], M[piv] = M[piv], M[i]
            sign = -sign
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                M[r][c] = (M[r][c] * M[i][i] - M[r][i] * M[i][c]) // prev
        prev = M[i][i]
    return sign * M[n - 1][n - 1]


def _sylvester(p: list[int], q: list[int]) -> list[list[int]]:
    # coefficient lists from the constant term up
    m, l = len(p) - 1, len(q) - 1
    rows = []
    for i in range(l):
        rows.append([0] * i + p[::-1] + [0] * (l - 1 - i))
    for i in range(m):
        rows.append([0] * i + q[::-1] + [0] * (m - 1 - i))
    return rows


def _integral(p: MultiPoly) -> MultiPoly:
    den = reduce(lcm, (Fraction(v).denominator for _, v in p.items()), 1)
    return p.scale(den)


def _in_b(p: MultiPoly, a_val: int, deg_b: int) -> list[int]:
    ia, ib = p.varset.index("a"), p.varset.index("b")
    out = [0] * (deg_b + 1)
    for e, c in p.items():
        out[e[ib]] += int(c) * a_val ** e[ia]
    return out


def elimination_poly(sys: ClosureSystem) -> UniPoly:
    """``Res_b(eq0, eq1)`` as an exact polynomial in ``a``.

    Computed by evaluation at integers and interpolation; meant as an exact
    cross-check on small systems only (``n <= 12``).
    """
    if sys.n is not None and sys.n > 12:
        raise ValueError("exact elimination is only offered for n <= 12")
    p, q = (_integral(e) for e in sys.eqs)
    dp, dq = p.degree("b"), q.degree("b")
    bound = p.total_degree() * q.total_degree()
    xs: list[int] = []
    ys: list[int] = []
    j = 0
    while len(xs) < bound + 2:
        for a_val in ((j,) if j == 0 else (j, -j)):
            cp, cq = _in_b(p, a_val, dp), _in_b(q, a_val, dq)
            if cp[-1] and cq[-1]:
                xs.append(a_val)
                ys.append(_bareiss_det(_sylvester(cp, cq)))
        j += 1
    # Newton divided differences on all but the last point, which checks the result
    xs_fit, ys_fit = xs[:-1], [Fraction(y) for y in ys[:-1]]
    coef = ys_fit[:]
    for lvl in range(1, len(xs_fit)):
        for i in range(len(xs_fit) - 1, lvl - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs_fit[i] - xs_fit[i - lvl])
    R = UniPoly([coef[-1]])
    for i in range(len(xs_fit) - 2, -1, -1):
        R = R * UniPoly([-xs_fit[i], 1]) + UniPoly([coef[i]])
    if R(Fraction(xs[-1])) != ys[-1]:
        raise ArithmeticError("interpolated resultant failed its check point")
    return R
