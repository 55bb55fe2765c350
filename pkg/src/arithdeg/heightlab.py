"""Projective points, Weil heights, exact orbits and arithmetic-degree estimates."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Sequence

from arithdeg.exactnum.algnum import AlgNum, algnum_embed
from arithdeg.exactnum.bigfloat import context, default_prec
from arithdeg.rationalmap import RationalMap, map_apply, map_to_json

COMPLETED = "completed"
HIT_INDETERMINACY = "hit_indeterminacy"
RESOURCE_LIMIT = "resource_limit"


class ExtensionHeightError(ValueError):
    pass


@dataclass(frozen=True)
class ProjPoint:
    coords: tuple
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if not self.coords:
            raise ValueError("a point needs coordinates")

    @property
    def mode(self) -> str:
        return "extension" if any(isinstance(c, AlgNum) for c in self.coords) else "rational"

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __str__(self) -> str:
        if self.mode == "rational":
            return "[" + ":".join(str(c) for c in self.coords) + "]"
        return "[" + ":".join(str(c.repr) if isinstance(c, AlgNum) else str(c) for c in self.coords) + "]"


def _is_zero(c) -> bool:
    return c.is_zero() if isinstance(c, AlgNum) else c == 0


def point_normalize(P: ProjPoint | Sequence) -> ProjPoint:
    """Canonical representative.

    Rational points get coprime integer coordinates with the first nonzero
    one positive; points over a number field are scaled so that the first
    nonzero coordinate is 1.

    >>> str(point_normalize([Fraction(1, 2), Fraction(1, 3), 1]))
    '[3:2:6]'
    """
    coords = P.coords if isinstance(P, ProjPoint) else tuple(P)
    if all(_is_zero(c) for c in coords):
        raise ValueError("all coordinates are zero")
    lead = next(c for c in coords if not _is_zero(c))
    if any(isinstance(c, AlgNum) for c in coords):
        inv = 1 / lead
        return ProjPoint(tuple(c * inv for c in coords), True)
    fr = [Fraction(c) for c in coords]
    den = reduce(lcm, (c.denominator for c in fr), 1)
    ints = [int(c * den) for c in fr]
    g = reduce(gcd, ints, 0)
    if Fraction(lead) < 0:
        g = -g
    return ProjPoint(tuple(i // g for i in ints), True)


def weil_height(P: ProjPoint | Sequence, prec: int | None = None):
    """``log max |x_i|`` on the normalized representative of a rational point."""
    Q = point_normalize(P)
    if Q.mode != "rational":
        raise ExtensionHeightError("heights over extensions not supported")
    ctx = context(prec or default_prec())
    return ctx.log(ctx.mpf(max(abs(c) for c in Q.coords)))


def height_proxy(P: ProjPoint, prec: int | None = None):
    """Non-rigorous stand-in for points over number fields.

    Archimedean part only: ``log max |x_i|`` under the chosen embedding of
    the normalized point. It ignores the non-archimedean places and the
    field degree, so it is not the Weil height.
    """
    prec = prec or default_prec()
    Q = point_normalize(P)
    ctx = context(prec)
    vals = [abs(algnum_embed(c, prec)) if isinstance(c, AlgNum) else abs(ctx.mpf(Fraction(c).numerator) / Fraction(c).denominator)
            for c in Q.coords]
    return ctx.log(ctx.mpf(max(vals)))


def h_plus(h):
    """``max(h, 1)``."""
    if h < 0:
        raise ValueError("heights are nonnegative")
    return h if h > 1 else h * 0 + 1


# ------------------------------------------------------------------- orbits


@dataclass(frozen=True)
class OrbitLimits:
    max_height_bits: int = 1 << 22


@dataclass
class OrbitRecord:
    points: list[ProjPoint]
    heights: list
    stop_reason: str = COMPLETED
    stop_step: int | None = None
    proxy: bool = False
    limits: OrbitLimits = field(default_factory=OrbitLimits)

    def describe_stop(self) -> str:
        if self.stop_reason == COMPLETED:
            return COMPLETED
        return f"{self.stop_reason}({self.stop_step})"


def _integral_terms(f: RationalMap):
    """Coordinates of ``f`` as lists of (int coefficient, proj exponents), denominators cleared."""
    np_ = f.varset.nproj
    den = 1
    for c in f.coords:
        for _, v in c.items():
            den = lcm(den, Fraction(v).denominator)
    out = []
    for c in f.coords:
        terms = []
        for e, v in c.items():
            if any(e[np_:]):
                return None
            terms.append((int(Fraction(v) * den), e[:np_]))
        out.append(terms)
    return out


def _apply_int(terms, x: Sequence[int]) -> list[int]:
    pows: list[dict[int, int]] = [{0: 1} for _ in x]
    out = []
    for coord in terms:
        s = 0
        for c, e in coord:
            t = c
            for i, k in enumerate(e):
                if k:
                    p = pows[i].get(k)
                    if p is None:
                        p = pows[i][k] = x[i] ** k
                    t *= p
            s += t
        out.append(s)
    return out


def orbit(f: RationalMap, P: ProjPoint | Sequence, nmax: int, limits: OrbitLimits | None = None,
          prec: int | None = None) -> OrbitRecord:
    """``P, f(P), ..., f^nmax(P)``, stopping early at indeterminacy or the size cap.

    ``stop_step`` for ``hit_indeterminacy`` is the index of the point at which
    every coordinate of ``f`` vanishes.
    """
    limits = limits or OrbitLimits()
    prec = prec or default_prec()
    P = point_normalize(P)
    if P.dim != f.dim:
        raise ValueError(f"point of P^{P.dim} does not match map on P^{f.dim}")
    rational = P.mode == "rational" and not f.param_values
    fast = _integral_terms(f) if rational else None
    rec = OrbitRecord([P], [], limits=limits, proxy=not rational)
    rec.heights.append(weil_height(P, prec) if rational else height_proxy(P, prec))
    cur = P
    for k in range(nmax):
        if fast is not None:
            img = _apply_int(fast, cur.coords)
        else:
            img = map_apply(f, cur.coords)
        if all(_is_zero(v) for v in img):
            rec.stop_reason, rec.stop_step = HIT_INDETERMINACY, k
            return rec
        cur = point_normalize(img)
        if rational and max(abs(c) for c in cur.coords).bit_length() > limits.max_height_bits:
            rec.stop_reason, rec.stop_step = RESOURCE_LIMIT, k + 1
            return rec
        rec.points.append(cur)
        rec.heights.append(weil_height(cur, prec) if rational else height_proxy(cur, prec))
    return rec


# ---------------------------------------------------------- estimators


@dataclass
class AlphaEstimate:
    roots: list
    lower_seq: list
    upper_seq: list
    window_min: object
    window_max: object
    converged: bool
    ratios: list = field(default_factory=list)
    ratio_min: object = None
    ratio_max: object = None
    ratio_converged: bool = False
    window: int = 5
    tol: float = 0.02

    @property
    def estimate(self):
        return (self.window_min + self.window_max) / 2

    @property
    def ratio_estimate(self):
        return (self.ratio_min + self.ratio_max) / 2

    def to_json(self) -> dict:
        return {
            "window": self.window,
            "tolerance": self.tol,
            "root_estimates": [float(x) for x in self.roots],
            "window_min": float(self.window_min),
            "window_max": float(self.window_max),
            "converged": self.converged,
            "ratio_estimates": [float(x) for x in self.ratios],
            "ratio_window_min": float(self.ratio_min),
            "ratio_window_max": float(self.ratio_max),
            "ratio_converged": self.ratio_converged,
        }


def alpha_estimate(rec: OrbitRecord | Sequence, window: int = 5, tol: float = 0.02,
                   prec: int | None = None) -> AlphaEstimate:
    """Running ``h+(f^n P)^(1/n)`` with trailing-window bounds.

    ``lower_seq[n]`` and ``upper_seq[n]`` are the inf and sup of the root
    sequence from index ``n`` on (within the computed range), the finite
    analogues of liminf and limsup. The ratio sequence ``h+_(n+1) / h+_n``
    is reported alongside; it removes the ``h(P)^(1/n)`` bias of the roots
    when the starting height is large.
    """
    heights = rec.heights if isinstance(rec, OrbitRecord) else list(rec)
    if window < 1:
        raise ValueError("window must be positive")
    if len(heights) < window + 2:
        raise ValueError(f"orbit too short: {len(heights)} heights, need {window + 2}")
    ctx = context(prec or default_prec())
    hp = [ctx.mpf(1) if ctx.mpf(h) < 1 else ctx.mpf(h) for h in heights]
    roots = [hp[n] ** (ctx.mpf(1) / n) for n in range(1, len(hp))]
    lower = [min(roots[i:]) for i in range(len(roots))]
    upper = [max(roots[i:]) for i in range(len(roots))]
    tail = roots[-window:]
    ratios = [hp[n + 1] / hp[n] for n in range(len(hp) - 1)]
    rtail = ratios[-window:]
    wmin, wmax = min(tail), max(tail)
    rmin, rmax = min(rtail), max(rtail)
    return AlphaEstimate(roots, lower, upper, wmin, wmax, bool(wmax - wmin < tol), ratios, rmin, rmax,
                         bool(rmax - rmin < tol), window, tol)


def height_growth_bound(f: RationalMap, prec: int | None = None):
    """``log(m * H(f))``: ``m`` the most monomials in one coordinate, ``H`` the
    largest coefficient after clearing denominators.

    For coprime integer coordinates, ``|F_i(x)| <= m H max|x_j|^d``, so
    ``h(f(P)) <= d h(P) + log(m H)``.
    """
    terms = _integral_terms(f)
    if terms is None or f.param_values:
        raise ValueError("height bound needs rational coefficients")
    g = reduce(gcd, (abs(c) for coord in terms for c, _ in coord), 0)
    m = max(len(coord) for coord in terms)
    H = max(abs(c) // g for coord in terms for c, _ in coord)
    ctx = context(prec or default_prec())
    return ctx.log(ctx.mpf(m * H))


# ----------------------------------------------------------------- output


def orbit_csv(rec: OrbitRecord) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "coords", "height_nats", "hplus_root"])
    for n, (pt, h) in enumerate(zip(rec.points, rec.heights)):
        hp = h if h > 1 else 1
        root = "" if n == 0 else format(float(hp ** (1.0 / n)), ".12g")
        w.writerow([n, ":".join(str(c) for c in pt.coords) if pt.mode == "rational" else str(pt),
                    format(float(h), ".17g"), root])
    return buf.getvalue()


def orbit_json(rec: OrbitRecord, f: RationalMap | None = None) -> dict:
    return {
        "map": map_to_json(f) if f is not None else None,
        "limits": {"max_height_bits": rec.limits.max_height_bits},
        "stop_reason": rec.stop_reason,
        "stop_step": rec.stop_step,
        "heights_are_proxies": rec.proxy,
        "points": [str(p) for p in rec.points],
        "height_nats": [str(h) for h in rec.heights],
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
