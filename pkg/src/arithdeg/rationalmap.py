"""Rational self-maps of projective space given by homogeneous polynomials."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from arithdeg.exactnum.algnum import AlgNum
from arithdeg.exactnum.bigfloat import context
from arithdeg.exactnum.rational import parse_rat
from arithdeg.exactnum.unipoly import UniPoly
from arithdeg.multipoly import MultiPoly, VarSet, mp_parse, mp_proj_degree
from arithdeg.multipoly.gcd import mp_gcd_many_cofactors
from arithdeg.multipoly.evaluate import mp_eval, substitute_many

BUILTINS = ("f4", "fiber", "g5")


class ResourceLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class RationalMap:
    """``[coords[0] : ... : coords[N]]`` on P^N with ``N + 1 = len(varset.proj_vars)``.

    ``param_values`` holds values for parameter symbols that are kept
    symbolic in the coordinates (algebraic numbers); rational values are
    substituted into the coordinates up front.
    """

    varset: VarSet
    coords: tuple[MultiPoly, ...]
    param_values: Mapping[str, AlgNum] = field(default_factory=dict)
    name: str = field(default="", compare=False)

    @property
    def dim(self) -> int:
        return self.varset.nproj - 1

    @property
    def degree(self) -> int:
        return mp_proj_degree(next(c for c in self.coords if not c.is_zero()))

    def __call__(self, point: Sequence):
        return map_apply(self, point)

    def __str__(self) -> str:
        return "[" + " : ".join(str(c) for c in self.coords) + "]"

    def symbolic_params(self) -> list[str]:
        used = set()
        for c in self.coords:
            used |= c.variables()
        return [p for p in self.varset.param_vars if p in used and p not in self.param_values]


def identity_map(varset: VarSet) -> RationalMap:
    return RationalMap(varset, tuple(MultiPoly.var(varset, v) for v in varset.proj_vars), name="identity")


_BUILTIN_TEXT = {
    "f4": (("X", "Y", "Z", "A", "B"), (), ["X*Y + A*X", "Y*Z + B*X", "X*Z", "A*X", "B*X"]),
    "fiber": (("X", "Y", "Z"), ("a", "b"), ["X*Y + a*X*Z", "Y*Z + b*X*Z", "X*Z"]),
    "g5": (("X", "Y", "Z", "A", "B", "C"), (),
           ["X*Y + A*X", "Y*Z + B*X", "X*Z", "A*X + C*Y", "B*X + C*Z", "C^2"]),
}


def map_builtin(name: str, params: Mapping[str, object] | None = None) -> RationalMap:
    """One of the builtin maps ``f4``, ``fiber``, ``g5``.

    >>> str(map_builtin("fiber"))
    '[X*Y + X*Z*a : Y*Z + X*Z*b : X*Z]'
    """
    if name not in _BUILTIN_TEXT:
        raise ValueError(f"unknown builtin map {name!r}; choose from {', '.join(BUILTINS)}")
    proj, par, texts = _BUILTIN_TEXT[name]
    if params and name != "fiber":
        raise ValueError(f"parameters only apply to 'fiber', not {name!r}")
    vs = VarSet(proj, par)
    coords = [mp_parse(t, vs) for t in texts]
    f = RationalMap(vs, tuple(coords), name=name)
    return specialize(f, params) if params else f


def specialize(f: RationalMap, params: Mapping[str, object]) -> RationalMap:
    """Bind parameters: rationals are substituted, algebraic numbers are recorded."""
    rat: dict[str, Fraction] = {}
    alg: dict[str, AlgNum] = dict(f.param_values)
    for k, v in params.items():
        if k not in f.varset.param_vars:
            raise KeyError(f"unknown parameter {k!r}")
        if isinstance(v, AlgNum):
            q = v.as_rational()
            if q is None:
                alg[k] = v
                continue
            v = q
        rat[k] = Fraction(v)
    fields_ = {a.minpoly for a in alg.values()}
    if len(fields_) > 1:
        raise ValueError("algebraic parameters must lie in one number field")
    coords = tuple(mp_eval(c, rat) if rat else c for c in f.coords)
    return RationalMap(f.varset, coords, alg, f.name)


def map_normalize(coords: Sequence[MultiPoly], param_values: Mapping[str, AlgNum] | None = None,
                  name: str = "") -> RationalMap:
    """Divide all coordinates by their common gcd.

    The gcd is taken over Q[variables], so algebraic parameter values are
    not used for cancellation (they stay symbolic).
    """
    coords = list(coords)
    if not coords or all(c.is_zero() for c in coords):
        raise ValueError("all coordinates are zero")
    vs = coords[0].varset
    if any(len(c.proj_degrees()) > 1 for c in coords if not c.is_zero()):
        raise ValueError("coordinates must be homogeneous in the projective variables")
    degs = {mp_proj_degree(c) for c in coords if not c.is_zero()}
    if len(degs) != 1:
        raise ValueError(f"coordinates have different degrees {sorted(degs)}")
    g, cof = mp_gcd_many_cofactors(coords)
    if not g.is_constant():
        coords = cof
    else:
        # scale away a rational content shared by all coordinates
        c0 = _common_content(coords)
        if c0 != 1:
            coords = [c.scale(1 / c0) for c in coords]
    return RationalMap(vs, tuple(coords), dict(param_values or {}), name)


def _common_content(coords: Sequence[MultiPoly]) -> Fraction:
    from math import gcd, lcm

    num, den = 0, 1
    for c in coords:
        if c.is_zero():
            continue
        ic = c.integer_content()
        num = gcd(num, ic.numerator)
        den = lcm(den, ic.denominator)
    return Fraction(num, den)


def map_compose(f: RationalMap, g: RationalMap, normalize: bool = True) -> RationalMap:
    """The map ``f o g`` in lowest terms."""
    if f.varset != g.varset:
        raise ValueError("maps live on different varsets")
    if len(g.coords) != f.varset.nproj:
        raise ValueError(f"dimension mismatch: {len(g.coords)} vs {f.varset.nproj}")
    vals = dict(f.param_values)
    for k, v in g.param_values.items():
        if k in vals and vals[k] != v:
            raise ValueError(f"maps disagree on parameter {k!r}")
        vals[k] = v
    images = list(g.coords) + [MultiPoly.var(f.varset, p) for p in f.varset.param_vars]
    raw = substitute_many(list(f.coords), images)
    if not normalize:
        return RationalMap(f.varset, tuple(raw), vals, "")
    return map_normalize(raw, vals)


def map_apply(f: RationalMap, point: Sequence):
    """Image coordinates of ``point`` (exact for rational or algebraic input)."""
    if len(point) != f.varset.nproj:
        raise ValueError(f"point has {len(point)} coordinates, map needs {f.varset.nproj}")
    bind: dict[str, object] = dict(zip(f.varset.proj_vars, point))
    bind.update(f.param_values)
    sym = f.symbolic_params()
    if sym:
        raise ValueError(f"parameters {sym} are unbound")
    out = []
    for c in f.coords:
        if c.is_zero():
            out.append(Fraction(0))
            continue
        used = c.variables()
        out.append(mp_eval(c, {k: v for k, v in bind.items() if k in used}) if used else Fraction(c.terms[0]))
    return out


def _is_zero(v) -> bool:
    if isinstance(v, AlgNum):
        return v.is_zero()
    return v == 0


def indeterminacy_check(f: RationalMap, point: Sequence) -> bool:
    """True iff every coordinate of ``f`` vanishes at ``point``."""
    return all(_is_zero(v) for v in map_apply(f, point))


def jacobian_det(f: RationalMap) -> MultiPoly:
    """Determinant of the matrix of partial derivatives in the projective variables."""
    vs = f.varset
    n = vs.nproj
    if len(f.coords) != n:
        raise ValueError("jacobian needs a self-map")
    jac = [[c.derivative(v) for v in vs.proj_vars] for c in f.coords]
    # Laplace expansion along rows, memoized over the set of used columns
    memo: dict[tuple[int, ...], MultiPoly] = {(): MultiPoly.const(vs, 1)}

    def minor(cols: tuple[int, ...]) -> MultiPoly:
        if cols in memo:
            return memo[cols]
        row = n - len(cols)
        total = MultiPoly(vs)
        for j, col in enumerate(cols):
            entry = jac[row][col]
            if entry.is_zero():
                continue
            rest = minor(cols[:j] + cols[j + 1:])
            term = entry * rest
            total = total + term if j % 2 == 0 else total - term
        memo[cols] = total
        return total

    return minor(tuple(range(n)))


# ----------------------------------------------------------- degree sequences


@dataclass
class DegreeSequence:
    degs: list[int]
    truncated: bool = False
    reason: str = ""
    generic_only: bool = False
    terms: list[int] = field(default_factory=list)

    def root_estimates(self, prec: int = 64) -> list:
        ctx = context(prec)
        return [ctx.mpf(d) ** (ctx.mpf(1) / k) for k, d in enumerate(self.degs, start=1)]

    def ratio_estimates(self, prec: int = 64) -> list:
        ctx = context(prec)
        return [ctx.mpf(b) / a for a, b in zip(self.degs, self.degs[1:])]

    def growth_diagnostic(self, prec: int = 64):
        """Last ratio ``d_K / d_(K-1)``; falls back to ``d_1`` when K = 1."""
        r = self.ratio_estimates(prec)
        return r[-1] if r else context(prec).mpf(self.degs[0])

    def is_submultiplicative(self) -> bool:
        d = self.degs
        return all(d[j + k + 1] <= d[j] * d[k] for j in range(len(d)) for k in range(len(d) - j - 1))

    def recurrence_holds(self, lags: tuple[int, ...], start: int) -> bool:
        """Check ``d_(k+m) = sum d_(k+m-lag)`` from index ``start`` on (0-based, m = max lag)."""
        m = max(lags)
        d = self.degs
        checks = [d[k] == sum(d[k - lag] for lag in lags) for k in range(max(start, m), len(d))]
        return bool(checks) and all(checks)

    def to_json(self) -> dict:
        return {
            "degs": self.degs,
            "truncated": self.truncated,
            "reason": self.reason,
            "generic_only": self.generic_only,
            "terms": self.terms,
            "root_estimates": [float(x) for x in self.root_estimates()],
            "ratio_estimates": [float(x) for x in self.ratio_estimates()],
        }


@dataclass(frozen=True)
class Limits:
    """Deterministic work caps: total stored terms of an iterate, and estimated
    coefficient multiplications of one composition step."""

    max_terms: int = 400_000
    max_ops: int = 60_000_000


def _compose_cost(f: RationalMap, g: RationalMap) -> int:
    """Upper estimate of coefficient multiplications in substituting ``g`` into ``f``."""
    top = max(len(c) for c in g.coords)
    monos = {e[: f.varset.nproj] for c in f.coords for e, _ in c.items()}
    return len(monos) * top ** f.degree


def degree_sequence(f: RationalMap, K: int, limits: Limits | None = None) -> DegreeSequence:
    """Degrees of ``f, f^2, ..., f^K``, computed as ``f^(k+1) = f o f^k`` in lowest terms.

    With algebraic parameter values the gcd cannot see cancellation over the
    number field, so the parameters are treated as symbols and the result is
    flagged ``generic_only``.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    limits = limits or Limits()
    generic_only = bool(f.param_values)
    base = RationalMap(f.varset, f.coords, {}, f.name)
    current = map_normalize(base.coords)
    seq = DegreeSequence([current.degree], generic_only=generic_only,
                         terms=[sum(len(c) for c in current.coords)])
    for _ in range(2, K + 1):
        cost = _compose_cost(base, current)
        if cost > limits.max_ops:
            seq.truncated, seq.reason = True, f"composition cost estimate {cost} exceeds max_ops {limits.max_ops}"
            break
        current = map_compose(base, current)
        nterms = sum(len(c) for c in current.coords)
        seq.degs.append(current.degree)
        seq.terms.append(nterms)
        if nterms > limits.max_terms and len(seq.degs) < K:
            seq.truncated, seq.reason = True, f"iterate has {nterms} terms, above max_terms {limits.max_terms}"
            break
    return seq


# ------------------------------------------------------- hyperplane check


@dataclass
class RestrictionReport:
    trials: int
    invariant: int
    matches: int
    resampled: int
    seed: int
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.invariant == self.trials and self.matches == self.trials

    def to_json(self) -> dict:
        return {"trials": self.trials, "hyperplane_preserved": self.invariant, "matches_f4": self.matches,
                "resampled_indeterminate": self.resampled, "seed": self.seed, "passed": self.passed,
                "failures": self.failures}


def restriction_check(trials: int = 100, seed: int = 0, max_height: int = 1000) -> RestrictionReport:
    """Random rational points of ``C = 0`` in P^5: ``g5`` keeps them in ``C = 0``
    and its first five coordinates agree exactly with ``f4`` of the first five.

    Points where ``f4`` vanishes identically are resampled and counted.
    """
    import random

    g, f = map_builtin("g5"), map_builtin("f4")
    rng = random.Random(seed)
    rep = RestrictionReport(trials, 0, 0, 0, seed)
    done = 0
    while done < trials:
        x = [Fraction(rng.randint(-max_height, max_height), rng.randint(1, max_height)) for _ in range(5)]
        img_f = map_apply(f, x)
        if all(v == 0 for v in img_f):
            rep.resampled += 1
            continue
        img_g = map_apply(g, x + [Fraction(0)])
        done += 1
        inv = img_g[5] == 0
        same = list(img_g[:5]) == list(img_f)
        rep.invariant += inv
        rep.matches += same
        if not (inv and same):
            rep.failures.append({"point": [str(v) for v in x], "g5": [str(v) for v in img_g]})
    return rep


# ------------------------------------------------------------------- JSON I/O


def _param_from_json(spec: Mapping) -> object:
    if "rat" in spec:
        return parse_rat(str(spec["rat"]))
    if "minpoly" in spec:
        m = UniPoly([parse_rat(str(c)) for c in spec["minpoly"]])
        re_, im_ = (list(spec.get("approx", [0.0, 0.0])) + [0.0])[:2]
        rep = UniPoly([parse_rat(str(c)) for c in spec["repr"]]) if "repr" in spec else None
        return AlgNum(m, rep, complex(float(re_), float(im_)))
    raise ValueError(f"bad parameter spec {spec!r}")


def map_from_json(data: Mapping) -> RationalMap:
    params = {k: _param_from_json(v) for k, v in (data.get("params") or {}).items()}
    if "builtin" in data:
        return map_builtin(data["builtin"], params or None)
    vs = VarSet(tuple(data["proj_vars"]), tuple(data.get("param_vars", [])))
    if "dim" in data and data["dim"] != vs.nproj - 1:
        raise ValueError(f"dim {data['dim']} does not match {vs.nproj} projective variables")
    coords = tuple(mp_parse(t, vs) for t in data["coords"])
    if len(coords) != vs.nproj:
        raise ValueError("number of coordinates must equal number of projective variables")
    f = map_normalize(coords, name=data.get("name", ""))
    return specialize(f, params) if params else f


def map_to_json(f: RationalMap) -> dict:
    out: dict = {
        "dim": f.dim,
        "proj_vars": list(f.varset.proj_vars),
        "param_vars": list(f.varset.param_vars),
        "coords": [str(c) for c in f.coords],
    }
    if f.param_values:
        out["params"] = {
            k: {"minpoly": [str(c) for c in v.minpoly.coeffs], "approx": [v.embedding.real, v.embedding.imag],
                "repr": [str(c) for c in v.repr.coeffs]}
            for k, v in f.param_values.items()
        }
    return out


def load_map(path: str) -> RationalMap:
    with open(path, encoding="utf-8") as fh:
        return map_from_json(json.load(fh))


def resolve_map(spec: str, params: Mapping[str, object] | None = None) -> RationalMap:
    """A builtin name (optionally ``builtin:NAME``) or a path to a map JSON file."""
    if spec.startswith("builtin:"):
        spec = spec[len("builtin:"):]
        if spec not in BUILTINS:
            raise ValueError(f"unknown builtin map {spec!r}")
    if spec in BUILTINS:
        return map_builtin(spec, params)
    f = load_map(spec)
    return specialize(f, params) if params else f


__all__ = [
    "BUILTINS", "DegreeSequence", "Limits", "RationalMap", "ResourceLimitError", "RestrictionReport",
    "degree_sequence", "restriction_check",
    "identity_map", "indeterminacy_check", "jacobian_det", "load_map", "map_apply", "map_builtin",
    "map_compose", "map_from_json", "map_normalize", "map_to_json", "resolve_map", "specialize",
]
