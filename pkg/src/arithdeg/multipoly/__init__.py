"""Sparse multivariate polynomials over Q in projective variables and parameters."""
from arithdeg.multipoly.evaluate import mp_eval, substitute
from arithdeg.multipoly.gcd import mp_gcd, mp_gcd_many
from arithdeg.multipoly.parse import PolySyntaxError, UnknownVariableError, mp_parse, to_text
from arithdeg.multipoly.poly import MultiPoly, VarSet


def mp_arith(p: MultiPoly, q, op: str) -> MultiPoly:
    if op == "+":
        return p + q
    if op == "-":
        return p - q
    if op == "*":
        return p * q
    if op == "/":
        return p.exact_div(q)
    raise ValueError(f"unknown operation {op!r}")


def mp_proj_degree(p: MultiPoly) -> int:
    """Largest degree of a term in the projective variables (parameters have weight 0)."""
    if p.is_zero():
        raise ValueError("degree of zero")
    return max(p.proj_degrees())


__all__ = [
    "MultiPoly", "VarSet", "PolySyntaxError", "UnknownVariableError",
    "mp_arith", "mp_eval", "mp_gcd", "mp_gcd_many", "mp_parse", "mp_proj_degree", "substitute", "to_text",
]
