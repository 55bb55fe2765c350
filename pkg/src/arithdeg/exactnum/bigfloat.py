"""Multi-precision floating point on top of :mod:`mpmath`.

Every routine that needs floats takes an explicit precision in bits and
builds its own :class:`mpmath.MPContext`, so nothing depends on (or mutates)
mpmath's global context.
"""
from __future__ import annotations

import os
from fractions import Fraction

import mpmath

DEFAULT_PREC = 256
MIN_PREC = 53
PREC_ENV = "ARITHDEG_PREC"


def default_prec() -> int:
    raw = os.environ.get(PREC_ENV)
    if raw is None:
        return DEFAULT_PREC
    prec = int(raw)
    if prec < MIN_PREC:
        raise ValueError(f"{PREC_ENV}={raw} below the {MIN_PREC}-bit floor")
    return prec


def context(prec: int) -> mpmath.ctx_mp.MPContext:
    if prec < MIN_PREC:
        raise ValueError(f"precision {prec} below {MIN_PREC} bits")
    ctx = mpmath.MPContext()
    ctx.prec = prec
    return ctx


def to_mp(ctx, x):
    """Convert an int, Fraction, float, complex or mpmath number into ``ctx``."""
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / x.denominator
    if isinstance(x, complex):
        return ctx.mpc(x.real, x.imag)
    if isinstance(x, (int, float)):
        return ctx.mpf(x)
    if hasattr(x, "imag") and hasattr(x, "_mpc_"):
        return ctx.mpc(x)
    return ctx.convert(x)


def mp_str(x, digits: int = 30) -> str:
    return mpmath.nstr(x, digits, strip_zeros=False)
