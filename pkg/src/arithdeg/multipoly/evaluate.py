"""Evaluation of MultiPoly at rational, algebraic, floating or polynomial bindings."""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from arithdeg.exactnum.algnum import AlgNum
from arithdeg.exactnum.unipoly import UniPoly
from arithdeg.multipoly.poly import _MASK, MultiPoly, VarSet, _norm, mul_terms

_RAT, _ALG, _FLOAT, _POLY = "rational", "algebraic", "float", "polynomial"


def _kind(v) -> str:
    if isinstance(v, bool):
        raise TypeError("booleans are not valid bindings")
    if isinstance(v, (int, Fraction)):
        return _RAT
    if isinstance(v, AlgNum):
        return _ALG
    if isinstance(v, MultiPoly):
        return _POLY
    if hasattr(v, "_mpf_") or hasattr(v, "_mpc_") or isinstance(v, (float, complex)):
        return _FLOAT
    raise TypeError(f"unsupported binding {v!r}")


def _binding_kind(bindings: Mapping[str, object]) -> str:
    kinds = {_kind(v) for v in bindings.values()}
    if len(kinds) > 1:
        # rationals mix freely with algebraic or float values of one kind
        kinds.discard(_RAT)
    if len(kinds) > 1:
        raise TypeError(f"mixed-kind bindings: {sorted(kinds)}")
    return kinds.pop() if kinds else _RAT


def mp_eval(p: MultiPoly, bindings: Mapping[str, object]):
    """Evaluate ``p`` with some or all variables bound.

    Binding every variable that occurs returns a scalar of the binding kind.
    Binding a subset to rationals returns a MultiPoly over the same varset
    in which the bound variables no longer occur.  Binding to MultiPolys
    substitutes (unbound variables are left alone).
    """
    vs = p.varset
    for name in bindings:
        if name not in vs.names:
            raise KeyError(f"unknown variable {name!r}")
    kind = _binding_kind(bindings)
    if kind == _POLY:
        subs = {}
        for name, v in bindings.items():
            if isinstance(v, MultiPoly):
                subs[name] = v
            else:
                subs[name] = None
        target = next(v for v in subs.values() if v is not None).varset
        full = {}
        for name in vs.names:
            v = bindings.get(name)
            if v is None:
                if name not in target.names:
                    raise KeyError(f"variable {name!r} missing from target varset")
                full[name] = MultiPoly.var(target, name)
            elif isinstance(v, MultiPoly):
                full[name] = v
            else:
                full[name] = MultiPoly.const(target, v)
        return substitute(p, [full[n] for n in vs.names])
    unbound = [n for n in p.variables() if n not in bindings]
    if unbound:
        if kind != _RAT:
            raise TypeError("partial evaluation needs rational bindings")
        return _partial(p, bindings)
    return _evaluate_total(p, bindings, kind)


def _evaluate_total(p: MultiPoly, bindings: Mapping[str, object], kind: str):
    shifts = p._pk.shifts
    idx = [(i, s, bindings[n]) for i, (n, s) in enumerate(zip(p.varset.names, shifts)) if n in bindings]
    if kind == _RAT:
        idx = [(i, s, Fraction(v)) for i, s, v in idx]
    powcache: list[dict[int, object]] = [dict() for _ in idx]
    total = 0
    for k, c in p.terms.items():
        term: object = c
        for j, (_, s, v) in enumerate(idx):
            e = (k >> s) & _MASK
            if e:
                cache = powcache[j]
                pv = cache.get(e)
                if pv is None:
                    pv = cache[e] = v**e
                term = term * pv
        total = total + term
    if kind == _RAT:
        return Fraction(total)
    if kind == _ALG and not isinstance(total, AlgNum):
        ref = next(v for v in bindings.values() if isinstance(v, AlgNum))
        return AlgNum(ref.minpoly, UniPoly([total]), ref.embedding, _checked=True)
    return total


def _partial(p: MultiPoly, bindings: Mapping[str, object]) -> MultiPoly:
    shifts = p._pk.shifts
    bound = [(s, Fraction(bindings[n])) for n, s in zip(p.varset.names, shifts) if n in bindings]
    out: dict[int, object] = {}
    for k, c in p.terms.items():
        val = Fraction(c)
        for s, v in bound:
            e = (k >> s) & _MASK
            if e:
                val *= v**e
                k -= e << s
        if val:
            out[k] = out.get(k, 0) + val
    return MultiPoly(p.varset, {k: _norm(v) for k, v in out.items() if v}, _trusted=True)


def substitute(p: MultiPoly, images: Sequence[MultiPoly]) -> MultiPoly:
    """``p(images[0], images[1], ...)``, all images over one common varset."""
    return substitute_many([p], images)[0]


def substitute_many(polys: Sequence[MultiPoly], images: Sequence[MultiPoly]) -> list[MultiPoly]:
    """Substitute the same images into several polynomials.

    Monomial products are cached by exponent vector and built from smaller
    ones, so a product shared by several terms (or several polynomials) is
    computed once.
    """
    if not polys:
        return []
    vs = polys[0].varset
    if len(images) != vs.nvars:
        raise ValueError("need one image per variable")
    target = images[0].varset
    for q in images:
        if q.varset != target:
            raise ValueError("images must share a varset")
    unpack = polys[0]._pk.unpack
    n = vs.nvars
    zero = (0,) * n
    cache: dict[tuple[int, ...], dict] = {zero: {0: 1}}

    def mono(exps: tuple[int, ...]) -> dict:
        got = cache.get(exps)
        if got is not None:
            return got
        # peel off one power of the last variable that occurs
        i = max(j for j in range(n) if exps[j])
        smaller = exps[:i] + (exps[i] - 1,) + exps[i + 1:]
        got = mul_terms(mono(smaller), images[i].terms)
        cache[exps] = got
        return got

    out = []
    for p in polys:
        if p.varset != vs:
            raise ValueError("polynomials must share a varset")
        total: dict[int, object] = {}
        get = total.get
        for k, c in p.terms.items():
            for kk, cc in mono(unpack(k)).items():
                total[kk] = get(kk, 0) + c * cc
        out.append(MultiPoly(target, {kk: _norm(v) for kk, v in total.items() if v}, _trusted=True))
    return out


def mp_eval_many(polys: Sequence[MultiPoly], bindings: Mapping[str, object]) -> list:
    return [mp_eval(q, bindings) for q in polys]


def extend_varset(vs: VarSet, extra_params: Sequence[str]) -> VarSet:
    return VarSet(vs.proj_vars, vs.param_vars + tuple(x for x in extra_params if x not in vs.names))
