"""The family chi_n, its largest roots delta_n, and the Picard-lattice model.

``chi_n(x) = x^(n-2) (x^3 - x - 1) + x^3 + x^2 - 1`` always vanishes at 1.
After deflating ``x - 1`` its largest real root lies in ``(1, 2]`` and is
enclosed by exact Sturm isolation and bisection.

The lattice model is the pullback action of a quadratic plane map lifted to a
blow-up in ``n`` points, in the basis ``H, E_1, ..., E_n``.  With
indeterminacy points ``p_1, p_2, p_3`` and ``Sigma_i`` the contracted line
through the two ``p`` other than ``p_i``:

* ``F* H = 2H - E_1 - E_2 - E_3``;
* if ``Sigma_i`` is contracted to the first point ``q`` of a blown-up
  orbit, ``F* E_q = H - E_j - E_k``;
* every later point ``x`` of an orbit has ``F* E_x = E_(f^-1 x)``.

Each orbit ends at one of the ``p``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Sequence

from arithdeg.exactnum.bigfloat import context, default_prec, to_mp
from arithdeg.exactnum.rational import as_rat, rat_to_decimal
from arithdeg.exactnum.unipoly import Interval, UniPoly, largest_real_root, refine_root, sturm_isolate

CUBIC = UniPoly([-1, -1, 0, 1])  # x^3 - x - 1


class IsometryError(ValueError):
    pass


class NonRealDominantError(ValueError):
    pass


@dataclass(frozen=True)
class ChiFamily:
    n: int
    poly: UniPoly


def chi(n: int) -> ChiFamily:
    """``x^(n+1) - x^(n-1) - x^(n-2) + x^3 + x^2 - 1``.

    >>> str(chi(10).poly)
    'x^11 - x^9 - x^8 + x^3 + x^2 - 1'
    """
    if n < 10:
        raise ValueError(f"chi_n is defined here for n >= 10, got {n}")
    c = [Fraction(0)] * (n + 2)
    c[n + 1] += 1
    c[n - 1] -= 1
    c[n - 2] -= 1
    c[3] += 1
    c[2] += 1
    c[0] -= 1
    return ChiFamily(n, UniPoly(c))


def chi_deflated(n: int) -> UniPoly:
    return chi(n).poly.exact_div(UniPoly([-1, 1]))


def delta(n: int, eps) -> Interval:
    """Enclosure of width below ``eps`` of the largest real root of ``chi_n``."""
    eps = as_rat(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    q = chi_deflated(n)
    if not q.is_squarefree():
        raise ValueError(f"chi_{n}/(x-1) is not square-free")
    isos = sturm_isolate(q, Interval(1, 2))
    if not isos:
        raise ValueError(f"no root of chi_{n}/(x-1) in (1, 2]")
    return refine_root(q, isos[-1], eps)


def delta_star(eps) -> Interval:
    """Enclosure of the real root of ``x^3 - x - 1``."""
    iv = largest_real_root(CUBIC, as_rat(eps))
    assert iv is not None
    return iv


@dataclass
class MonotoneReport:
    ns: list[int]
    enclosures: list[Interval]
    star: Interval
    increasing: bool
    below_star: bool

    @property
    def ok(self) -> bool:
        return self.increasing and self.below_star


def certify_monotone(n_lo: int, n_hi: int, eps=Fraction(1, 10**6), max_rounds: int = 200) -> MonotoneReport:
    """Enclose delta_n for n in [n_lo, n_hi] and refine until neighbours are disjoint.

    Success means ``hi(delta_n) < lo(delta_(n+1))`` for all n and
    ``hi(delta_(n_hi)) < lo(delta_star)``.
    """
    eps = as_rat(eps)
    ns = list(range(n_lo, n_hi + 1))
    polys = {n: chi_deflated(n) for n in ns}
    encl = [delta(n, eps) for n in ns]
    star = delta_star(eps)
    for _ in range(max_rounds):
        bad = [i for i in range(len(ns) - 1) if not encl[i].strictly_below(encl[i + 1])]
        star_bad = not encl[-1].strictly_below(star)
        if not bad and not star_bad:
            return MonotoneReport(ns, encl, star, True, True)
        for i in set(bad) | {j + 1 for j in bad}:
            encl[i] = refine_root(polys[ns[i]], encl[i], max(encl[i].width / 4, Fraction(1, 10**300)))
        if star_bad:
            encl[-1] = refine_root(polys[ns[-1]], encl[-1], encl[-1].width / 4)
            star = refine_root(CUBIC, star, star.width / 4)
    inc = all(encl[i].strictly_below(encl[i + 1]) for i in range(len(ns) - 1))
    return MonotoneReport(ns, encl, star, inc, encl[-1].strictly_below(star))


def delta_table(ns: Sequence[int], eps, digits: int = 15) -> str:
    """CSV ``n, lo, hi, width``; endpoints rounded outward."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "lo", "hi", "width"])
    for n in ns:
        iv = delta(n, eps)
        w.writerow([n, rat_to_decimal(iv.lo, digits), rat_to_decimal(iv.hi, digits, upward=True),
                    rat_to_decimal(iv.width, digits, upward=True)])
    return buf.getvalue()


# ---------------------------------------------------------- exact linear algebra


def char_poly(M: Sequence[Sequence[int]]) -> UniPoly:
    """``det(x I - M)`` by Berkowitz's division-free algorithm.

    >>> str(char_poly([[2, 0], [0, -1]]))
    'x^2 - x - 2'
    """
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("matrix is not square")
    vect = [1]  # highest degree first
    for r in range(n):
        col = [M[i][r] for i in range(r)]
        row = M[r][:r]
        coeffs = [1, -M[r][r]]
        v = col
        for _ in range(r):
            coeffs.append(-sum(a * b for a, b in zip(row, v)))
            v = [sum(M[i][j] * v[j] for j in range(r)) for i in range(r)]
        new = []
        for i in range(r + 2):
            s = 0
            for j in range(max(0, i - len(coeffs) + 1), min(i, len(vect) - 1) + 1):
                s += coeffs[i - j] * vect[j]
            new.append(s)
        vect = new
    return UniPoly(list(reversed(vect)))


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, colm)) for colm in zip(*B)] for row in A]


def _transpose(A):
    return [list(r) for r in zip(*A)]


def _phi_table(limit: int) -> list[int]:
    phi = list(range(limit + 1))
    for i in range(2, limit + 1):
        if phi[i] == i:
            for j in range(i, limit + 1, i):
                phi[j] -= phi[j] // i
    return phi


_CYCLO: dict[int, UniPoly] = {}


def cyclotomic(m: int) -> UniPoly:
    if m not in _CYCLO:
        p = UniPoly.monomial(m) - 1
        for d in range(1, m):
            if m % d == 0:
                p = p.exact_div(cyclotomic(d))
        _CYCLO[m] = p
    return _CYCLO[m]


def strip_cyclotomic(p: UniPoly) -> tuple[UniPoly, dict[int, int]]:
    """Remove all cyclotomic factors; returns the rest and the multiplicities."""
    deg = p.degree
    found: dict[int, int] = {}
    if deg < 1:
        return p, found
    phi = _phi_table(2 * deg * deg + 2)
    for m in range(1, len(phi)):
        if phi[m] > deg or phi[m] > p.degree:
            continue
        c = cyclotomic(m)
        while p.degree >= c.degree:
            q, r = p.divmod(c)
            if not r.is_zero():
                break
            p = q
            found[m] = found.get(m, 0) + 1
    return p, found


# --------------------------------------------------------------- Picard model


@dataclass(frozen=True)
class OrbitData:
    """Combinatorics of the blown-up orbits.

    ``indeterminacy``: the three classes ``p_1, p_2, p_3`` absorbed into
    ``F* H``.  ``starts``: map from the first class of each orbit to the two
    indeterminacy classes on the contracted line landing there.
    ``predecessor``: ``F* E_k = E_predecessor[k]`` for every other class.
    Classes are numbered ``1..n``.
    """

    n: int
    indeterminacy: tuple[int, int, int]
    starts: tuple[tuple[int, tuple[int, int]], ...]
    predecessor: tuple[tuple[int, int], ...]
    label: str = ""

    def describe(self) -> str:
        return self.label or f"starts={self.starts} predecessor={self.predecessor}"


def orbit_data_from_chains(n: int, lengths: Sequence[int], ends: Sequence[int], label: str = "") -> OrbitData:
    """Orbit data with three orbits, one per contracted line.

    Orbit ``i`` (``i = 0, 1, 2``) starts at the image of the line through the
    indeterminacy points other than ``p_(i+1)``, has ``lengths[i]`` points and
    ends at ``p_(ends[i])``.  Non-final orbit points get classes 4, 5, ...
    in order.
    """
    if sorted(ends) != [1, 2, 3]:
        raise ValueError("ends must be a permutation of 1, 2, 3")
    if sum(lengths) != n or min(lengths) < 1:
        raise ValueError(f"orbit lengths {list(lengths)} do not add up to n={n}")
    nxt = 4
    starts = []
    pred = []
    for i, (length, end) in enumerate(zip(lengths, ends)):
        line = tuple(j for j in (1, 2, 3) if j != i + 1)
        chain = []
        for _ in range(length - 1):
            chain.append(nxt)
            nxt += 1
        chain.append(end)
        starts.append((chain[0], line))
        for a, b in zip(chain, chain[1:]):
            pred.append((b, a))
    return OrbitData(n, (1, 2, 3), tuple(starts), tuple(sorted(pred)), label)


def geometric_orbit_data(n: int) -> OrbitData:
    """The bookkeeping read off from the fiber map itself.

    Indeterminacy points ``p_1 = (1:0:0)``, ``p_2 = (0:1:0)``,
    ``p_3 = (0:0:1)``.  The line ``X = 0`` (through ``p_2, p_3``) goes to
    ``p_2`` and ``Z = 0`` (through ``p_1, p_2``) goes to ``p_1``: orbits of
    length one. ``Y = 0`` goes to ``(a:b:1)``, whose orbit of ``n - 3``
    further points closes up at ``p_3``.
    """
    return orbit_data_from_chains(n, (1, n - 2, 1), (2, 3, 1), label="geometric")


def candidate_orbit_data(n: int) -> list[OrbitData]:
    """The 18 assignments with two one-point orbits and one orbit of length n-2."""
    out = []
    for long_i in range(3):
        lengths = [1, 1, 1]
        lengths[long_i] = n - 2
        for ends in permutations((1, 2, 3)):
            out.append(orbit_data_from_chains(n, lengths, ends, label=f"long={long_i + 1} ends={ends}"))
    return out


@dataclass(frozen=True)
class PicardMatrix:
    n: int
    M: tuple[tuple[int, ...], ...]
    orbit_data: OrbitData

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.M]


def intersection_form(n: int) -> list[list[int]]:
    return [[(1 if i == 0 else -1) if i == j else 0 for j in range(n + 1)] for i in range(n + 1)]


def picard_matrix(n: int, data: OrbitData) -> PicardMatrix:
    """Matrix of the pullback; column ``j`` holds the image of basis class ``j``."""
    if data.n != n:
        raise ValueError(f"orbit data is for n={data.n}, not {n}")
    size = n + 1
    cols: dict[int, list[int]] = {}
    h = [0] * size
    h[0] = 2
    for k in data.indeterminacy:
        h[k] -= 1
    cols[0] = h
    for q, (j, k) in data.starts:
        v = [0] * size
        v[0] = 1
        v[j] -= 1
        v[k] -= 1
        if q in cols:
            raise IsometryError(f"class E_{q} assigned twice")
        cols[q] = v
    for k, j in data.predecessor:
        if k in cols:
            raise IsometryError(f"class E_{k} assigned twice")
        v = [0] * size
        v[j] = 1
        cols[k] = v
    missing = [k for k in range(size) if k not in cols]
    if missing:
        raise IsometryError(f"classes {missing} have no image")
    M = [[cols[j][i] for j in range(size)] for i in range(size)]
    J = intersection_form(n)
    G = _matmul(_matmul(_transpose(M), J), M)
    for i in range(size):
        for j in range(size):
            if G[i][j] != J[i][j]:
                raise IsometryError(f"not an isometry: (M^T J M)[{i}][{j}] = {G[i][j]}, expected {J[i][j]}")
    return PicardMatrix(n, tuple(tuple(r) for r in M), data)


@dataclass
class PicardSearch:
    n: int
    accepted: list[OrbitData]
    rejected: list[tuple[OrbitData, str]]
    target: UniPoly


def search_orbit_data(n: int) -> PicardSearch:
    """Try every candidate; accept those whose characteristic polynomial
    is divisible by the non-cyclotomic part of chi_n with a cyclotomic cofactor."""
    target, _ = strip_cyclotomic(chi(n).poly)
    cands = [geometric_orbit_data(n)] + candidate_orbit_data(n)
    accepted, rejected = [], []
    seen = set()
    for d in cands:
        key = (d.starts, d.predecessor)
        if key in seen and d.label != "geometric":
            continue
        seen.add(key)
        try:
            P = picard_matrix(n, d)
        except IsometryError as exc:
            rejected.append((d, str(exc)))
            continue
        cp = char_poly(P.rows())
        q, r = cp.divmod(target)
        if not r.is_zero():
            rejected.append((d, "char poly not divisible by the non-cyclotomic factor of chi_n"))
            continue
        rest, _ = strip_cyclotomic(q)
        if rest.degree > 0:
            rejected.append((d, "cofactor is not cyclotomic"))
            continue
        accepted.append(d)
    return PicardSearch(n, accepted, rejected, target)


def spectral_radius(M: Sequence[Sequence[int]], eps, method: str = "auto", prec: int | None = None) -> Interval:
    """Enclosure of the spectral radius, which must be a real eigenvalue.

    The exact route isolates the largest real root of the characteristic
    polynomial and confirms numerically that no complex root is larger in
    modulus. ``method="power"`` (or ``auto`` on large matrices) runs power
    iteration and returns ``[lam - r, lam + r]`` with ``r`` the final residual
    ``|Mv - lam v| / |v|``; that bound is rigorous only for normal matrices.
    """
    eps = as_rat(eps)
    n = len(M)
    if method == "auto":
        method = "charpoly" if n <= 120 else "power"
    prec = prec or default_prec()
    if method == "power":
        return _power_radius(M, eps, prec)
    cp = char_poly(M)
    sq = cp.squarefree_part()
    iv = largest_real_root(sq, eps)
    if iv is None:
        raise NonRealDominantError("non-real dominant eigenvalue")
    ctx = context(prec)
    roots = ctx.polyroots([to_mp(ctx, c) for c in reversed(sq.coeffs)], maxsteps=500, extraprec=prec)
    rmax = max(abs(z) for z in roots)
    tol = ctx.mpf(2) ** (-(prec // 2))
    if rmax > to_mp(ctx, iv.hi) + tol:
        raise NonRealDominantError("non-real dominant eigenvalue")
    # a real root of larger modulus on the negative side also makes the radius non-positive-real
    neg = [z for z in roots if abs(ctx.im(z)) < tol and ctx.re(z) < 0 and abs(z) > to_mp(ctx, iv.hi) + tol]
    if neg:
        raise NonRealDominantError("dominant eigenvalue is negative")
    return iv


def _power_radius(M, eps: Fraction, prec: int) -> Interval:
    ctx = context(prec)
    n = len(M)
    A = [[ctx.mpf(x) for x in row] for row in M]
    v = [ctx.mpf(1) + ctx.mpf(i) / (7 * n) for i in range(n)]
    lam = ctx.mpf(0)
    res = ctx.inf
    for _ in range(20000):
        w = [ctx.fsum(a * b for a, b in zip(row, v)) for row in A]
        norm = ctx.sqrt(ctx.fsum(x * x for x in w))
        if norm == 0:
            raise NonRealDominantError("power iteration collapsed to zero")
        lam_new = ctx.fsum(a * b for a, b in zip(w, v)) / ctx.fsum(x * x for x in v)
        v = [x / norm for x in w]
        Av = [ctx.fsum(a * b for a, b in zip(row, v)) for row in A]
        res = ctx.sqrt(ctx.fsum((x - lam_new * y) ** 2 for x, y in zip(Av, v)))
        lam = lam_new
        if res < to_mp(ctx, eps) / 4:
            break
    else:
        raise NonRealDominantError("power iteration did not converge (dominant eigenvalue not real and simple?)")
    return Interval(_mpf_to_rat(lam - res * 2), _mpf_to_rat(lam + res * 2))


def _mpf_to_rat(x) -> Fraction:
    man, exp = x.man_exp
    return Fraction(man) * Fraction(2) ** exp
