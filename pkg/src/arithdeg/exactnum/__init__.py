"""Exact rationals, univariate polynomials with real-root isolation, number fields, bigfloats."""
from arithdeg.exactnum.algnum import AlgNum, FieldMismatchError, InsufficientPrecisionError, algnum_arith, algnum_embed
from arithdeg.exactnum.bigfloat import DEFAULT_PREC, context, default_prec, to_mp
from arithdeg.exactnum.rational import Rat, as_rat, parse_rat, rat_normalize, rat_to_decimal, simplest_between
from arithdeg.exactnum.unipoly import (
    Interval,
    RepeatedRootsError,
    UniPoly,
    count_roots,
    largest_real_root,
    refine_root,
    sturm_isolate,
    sturm_sequence,
)

__all__ = [
    "AlgNum", "FieldMismatchError", "InsufficientPrecisionError", "algnum_arith", "algnum_embed",
    "DEFAULT_PREC", "context", "default_prec", "to_mp",
    "Rat", "as_rat", "parse_rat", "rat_normalize", "rat_to_decimal", "simplest_between",
    "Interval", "RepeatedRootsError", "UniPoly", "count_roots", "largest_real_root", "refine_root",
    "sturm_isolate", "sturm_sequence",
]
