"""Multivariate gcd over Q.

Before any real work the inputs are made integral and primitive, and their
monomial content is stripped. A variable present in only one input is
eliminated through the content in that variable.  Inputs homogeneous in the
projective variables are dehomogenized.  What remains goes to a dense
modular algorithm in Brown's style: images modulo word-size primes, and
inside each prime a recursion on the last variable with evaluation and
Newton interpolation.  The images are combined by CRT until they stabilize,
and the candidate is accepted only after exact trial division over Z.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterator

from arithdeg.multipoly.poly import _MASK, FIELD, MultiPoly, divide_terms, packing_for

# ---------------------------------------------------------------- primes


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_PRIMES: list[int] = []


def _primes() -> Iterator[int]:
    i = 0
    while True:
        if i == len(_PRIMES):
            n = _PRIMES[-1] - 2 if _PRIMES else (1 << 61) - 1
            while not _is_prime(n):
                n -= 2
            _PRIMES.append(n)
        yield _PRIMES[i]
        i += 1


# ------------------------------------------------- dense univariate mod p


def _u_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _u_eval(a: list[int], x: int, p: int) -> int:
    v = 0
    for c in reversed(a):
        v = (v * x + c) % p
    return v


def _u_monic(a: list[int], p: int) -> list[int]:
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def _u_divmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    a = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    if len(a) <= db:
        return [], a
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] * inv % p
        if c:
            q[i - db] = c
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    return q, _u_trim(a[:db])


def _u_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _u_trim(list(a)), _u_trim(list(b))
    while b:
        a, b = b, _u_divmod(a, b, p)[1]
    return _u_monic(a, p) if a else []


def _u_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return [c % p for c in out]


def _u_add_scaled(a: list[int], b: list[int], s: int, p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = (out[i] + s * c) % p
    return _u_trim(out)


# ------------------------------------------------ multivariate mod p core


def _split_last(a: dict[int, int]) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for k, c in a.items():
        r, e = k >> FIELD, k & _MASK
        lst = out.get(r)
        if lst is None:
            lst = out[r] = []
        if len(lst) <= e:
            lst.extend([0] * (e + 1 - len(lst)))
        lst[e] = c
    return out


def _join_last(h: dict[int, list[int]]) -> dict[int, int]:
    out = {}
    for r, lst in h.items():
        base = r << FIELD
        for e, c in enumerate(lst):
            if c:
                out[base | e] = c
    return out


def _monic(a: dict[int, int], p: int) -> dict[int, int]:
    inv = pow(a[max(a)], -1, p)
    return {k: c * inv % p for k, c in a.items()}


def _gcd_modp(a: dict[int, int], b: dict[int, int], nv: int, p: int, strict: bool) -> dict[int, int] | None:
    """Monic gcd of nonzero ``a``, ``b`` in Z_p[x_1..x_nv]; ``None`` on failure."""
    if nv == 1:
        da = [0] * (max(a) + 1)
        for k, c in a.items():
            da[k] = c
        db = [0] * (max(b) + 1)
        for k, c in b.items():
            db[k] = c
        g = _u_gcd(da, db, p)
        return {e: c for e, c in enumerate(g) if c}
    sa, sb = _split_last(a), _split_last(b)
    ca = _content(sa, p)
    cb = _content(sb, p)
    c = _u_gcd(ca, cb, p)
    if len(ca) > 1:
        sa = {r: _u_divmod(l, ca, p)[0] for r, l in sa.items()}
    if len(cb) > 1:
        sb = {r: _u_divmod(l, cb, p)[0] for r, l in sb.items()}
    ra, rb = max(sa), max(sb)
    if ra == 0 or rb == 0:
        # one of them depends on the last variable only: gcd is the content part
        return {e: v for e, v in enumerate(c) if v}
    lca, lcb = sa[ra], sb[rb]
    g = _u_gcd(lca, lcb, p)
    bound = len(g) - 1 + min(max(len(l) for l in sa.values()), max(len(l) for l in sb.values())) - 1
    h: dict[int, list[int]] | None = None
    lmh = 0
    newton = [1]
    npts = 0
    for alpha in range(1, p):
        ga = _u_eval(g, alpha, p)
        if ga == 0 or _u_eval(lca, alpha, p) == 0 or _u_eval(lcb, alpha, p) == 0:
            continue
        aa = {r: v for r, l in sa.items() if (v := _u_eval(l, alpha, p))}
        ba = {r: v for r, l in sb.items() if (v := _u_eval(l, alpha, p))}
        gimg = _gcd_modp(aa, ba, nv - 1, p, strict)
        if gimg is None:
            return None
        lm = max(gimg)
        if lm == 0:
            return {e: v for e, v in enumerate(c) if v}
        gimg = {r: v * ga % p for r, v in gimg.items()}
        if h is None or lm < lmh:
            h = {r: [v] for r, v in gimg.items()}
            lmh = lm
            newton = [(-alpha) % p, 1]
            npts = 1
            changed = True
        elif lm > lmh:
            continue
        else:
            inv = pow(_u_eval(newton, alpha, p), -1, p)
            changed = False
            for r in set(h) | set(gimg):
                cur = h.get(r, [])
                diff = (gimg.get(r, 0) - _u_eval(cur, alpha, p)) % p
                if diff:
                    changed = True
                    new = _u_add_scaled(cur, newton, diff * inv % p, p)
                    if new:
                        h[r] = new
                    else:
                        h.pop(r, None)
            newton = _u_mul(newton, [(-alpha) % p, 1], p)
            npts += 1
        if npts > bound or (not strict and not changed):
            hc = _content(h, p)
            out = {r: _u_mul(_u_divmod(l, hc, p)[0], c, p) for r, l in h.items()}
            return _monic(_join_last(out), p)
    return None


def _content(s: dict[int, list[int]], p: int) -> list[int]:
    g: list[int] = []
    for lst in s.values():
        g = _u_gcd(g, lst, p) if g else _u_monic(_u_trim(list(lst)), p)
        if len(g) == 1:
            break
    return g


# ----------------------------------------------------------- over Z


def _symmetric(x: int, m: int) -> int:
    x %= m
    return x - m if x > m // 2 else x


def _gcd_int(a: dict[int, int], b: dict[int, int], nv: int) -> tuple[dict, dict, dict]:
    """Primitive gcd and cofactors of primitive integer polynomials over a compact packing."""
    pk = packing_for(nv)
    lca, lcb = a[max(a)], b[max(b)]
    gamma = gcd(lca, lcb)
    for strict in (False, True):
        h: dict[int, int] | None = None
        lmh = 0
        m = 1
        for count, p in enumerate(_primes()):
            if count > 400:
                break
            if lca % p == 0 or lcb % p == 0:
                continue
            ap = {k: v % p for k, v in a.items()}
            bp = {k: v % p for k, v in b.items()}
            gp = _gcd_modp(ap, bp, nv, p, strict)
            if gp is None:
                continue
            lm = max(gp)
            if lm == 0:
                return {0: 1}, a, b
            gp = {k: v * gamma % p for k, v in gp.items()}
            if h is None or lm < lmh:
                h, lmh, m = {k: _symmetric(v, p) for k, v in gp.items()}, lm, p
                continue
            if lm > lmh:
                continue
            minv = pow(m, -1, p)
            mp_ = m * p
            new = {}
            for k in set(h) | set(gp):
                old = h.get(k, 0)
                v = old + m * ((gp.get(k, 0) - old) * minv % p)
                v = _symmetric(v, mp_)
                if v:
                    new[k] = v
            stable = new == h
            h, m = new, mp_
            if stable:
                g = reduce_content(h)
                qa = divide_terms(a, g, pk, over_z=True)
                if qa is not None:
                    qb = divide_terms(b, g, pk, over_z=True)
                    if qb is not None:
                        return g, qa, qb
    raise RuntimeError("modular gcd failed to converge")


def reduce_content(h: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in h.values():
        g = gcd(g, v)
    if h[max(h)] < 0:
        g = -g
    return {k: v // g for k, v in h.items()}


# ------------------------------------------------------ preprocessing


def _used_fields(terms: dict[int, int], n: int) -> list[int]:
    acc = 0
    for k in terms:
        acc |= k
    pk = packing_for(n)
    return [i for i, s in enumerate(pk.shifts) if (acc >> s) & _MASK]


def _compact(terms: dict[int, int], n: int, keep: list[int]) -> dict[int, int]:
    src = packing_for(n)
    shifts = [src.shifts[i] for i in keep]
    out = {}
    for k, c in terms.items():
        nk = 0
        for s in shifts:
            nk = (nk << FIELD) | ((k >> s) & _MASK)
        out[nk] = c
    return out


def _expand(terms: dict[int, int], n: int, keep: list[int]) -> dict[int, int]:
    src = packing_for(len(keep))
    dst = packing_for(n)
    out = {}
    for k, c in terms.items():
        nk = 0
        for j, i in enumerate(keep):
            nk |= ((k >> src.shifts[j]) & _MASK) << dst.shifts[i]
        out[nk] = c
    return out


def _coeffs_in(terms: dict[int, int], shift: int) -> list[dict[int, int]]:
    groups: dict[int, dict[int, int]] = {}
    for k, c in terms.items():
        e = (k >> shift) & _MASK
        groups.setdefault(e, {})[k - (e << shift)] = c
    return list(groups.values())


def _core(a: dict[int, int], b: dict[int, int], n: int, homog: list[int]):
    """Primitive gcd of primitive integer term dicts with no monomial content.

    Returns ``(g, a/g, b/g)``; a cofactor is ``None`` when the route taken
    did not produce it.
    """
    if len(a) == 1 and 0 in a or len(b) == 1 and 0 in b:
        return {0: 1}, a, b
    pk = packing_for(n)
    ua, ub = set(_used_fields(a, n)), set(_used_fields(b, n))
    only = sorted(ua ^ ub)
    if only:
        i = only[0]
        src, other = (a, b) if i in ua else (b, a)
        g = other
        for coef in sorted(_coeffs_in(src, pk.shifts[i]), key=len):
            g = _core(reduce_content(coef), g, n, [])[0]
            if g == {0: 1}:
                return g, a, b
        return g, None, None
    keep = sorted(ua)
    if homog:
        hv = [i for i in homog if i in ua]
        if len(hv) >= 2 and _is_homog(a, pk, hv) and _is_homog(b, pk, hv):
            z = hv[-1]
            zs = pk.shifts[z]
            da = {k & ~(_MASK << zs): c for k, c in a.items()}
            db = {k & ~(_MASK << zs): c for k, c in b.items()}
            g, qa, qb = _core(da, db, n, [])
            return tuple(None if t is None else _rehomog(t, pk, hv, z) for t in (g, qa, qb))
    ca, cb = _compact(a, n, keep), _compact(b, n, keep)
    return tuple(_expand(t, n, keep) for t in _gcd_int(ca, cb, len(keep)))


def _is_homog(t: dict[int, int], pk, idx: list[int]) -> bool:
    degs = {sum((k >> pk.shifts[i]) & _MASK for i in idx) for k in t}
    return len(degs) == 1


def _rehomog(g: dict[int, int], pk, idx: list[int], z: int) -> dict[int, int]:
    degs = {k: sum((k >> pk.shifts[i]) & _MASK for i in idx) for k in g}
    top = max(degs.values())
    return {k + ((top - degs[k]) << pk.shifts[z]): c for k, c in g.items()}


def mp_gcd(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Gcd normalized to be integral, primitive, with positive leading coefficient.

    >>> from arithdeg.multipoly.parse import mp_parse
    >>> from arithdeg.multipoly.poly import VarSet
    >>> vs = VarSet(("X", "Y", "Z"))
    >>> str(mp_gcd(mp_parse("X^2 - Y^2", vs), mp_parse("X^2 + 2*X*Y + Y^2", vs)))
    'X + Y'
    """
    return mp_gcd_cofactors(p, q)[0]


def mp_gcd_cofactors(p: MultiPoly, q: MultiPoly) -> tuple[MultiPoly, MultiPoly, MultiPoly]:
    """``(g, p/g, q/g)`` with ``g`` normalized as in :func:`mp_gcd`."""
    p._check(q)
    if p.is_zero() and q.is_zero():
        raise ValueError("gcd of two zero polynomials")
    if p.is_zero() or q.is_zero():
        g = (q if p.is_zero() else p).primitive()
        return g, p.exact_div(g), q.exact_div(g)
    vs = p.varset
    pk = p._pk
    mp_, mq = p.monomial_content(), q.monomial_content()
    mono = pk.pack(min(x, y) for x, y in zip(pk.unpack(mp_), pk.unpack(mq)))
    pp, qp = p.primitive(), q.primitive()
    g, qa, qb = _core(pp.shift_down(mp_).terms, qp.shift_down(mq).terms, vs.nvars, list(range(vs.nproj)))
    gpoly = MultiPoly(vs, {k + mono: c for k, c in g.items()}, _trusted=True)
    sign = -1 if gpoly.leading_coeff < 0 else 1
    if sign < 0:
        gpoly = -gpoly
    out = [gpoly]
    for orig, prim, m, cof in ((p, pp, mp_, qa), (q, qp, mq, qb)):
        if cof is None:
            out.append(orig.exact_div(gpoly))
            continue
        # orig = c * x^m * prim_part and x^m * cof * g_core = x^m * prim_part
        c = Fraction(orig.leading_coeff) / prim.leading_coeff
        terms = {k + m - mono: v for k, v in cof.items()}
        out.append(MultiPoly(vs, terms, _trusted=True).scale(c * sign))
    return out[0], out[1], out[2]


def mp_gcd_many(polys: list[MultiPoly]) -> MultiPoly:
    return mp_gcd_many_cofactors(polys)[0]


def mp_gcd_many_cofactors(polys: list[MultiPoly]) -> tuple[MultiPoly, list[MultiPoly]]:
    """Gcd of several polynomials and each one divided by it."""
    nz = [i for i, f in enumerate(polys) if not f.is_zero()]
    if not nz:
        raise ValueError("gcd of zero polynomials")
    order = sorted(nz, key=lambda i: len(polys[i]))
    first = polys[order[0]]
    g = first.primitive()
    cof: dict[int, MultiPoly] = {order[0]: first.exact_div(g)}
    for i in order[1:]:
        f = polys[i]
        if g.is_constant():
            cof[i] = f.exact_div(g)
            continue
        g2, u, v = mp_gcd_cofactors(g, f)
        if u != 1:
            for j in cof:
                cof[j] = cof[j] * u
        cof[i] = v
        g = g2
    zero = MultiPoly(polys[0].varset)
    return g, [cof.get(i, zero) for i in range(len(polys))]
