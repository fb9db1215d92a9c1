"""Rigorous sin, cos, tan, atan on [0, pi/2) and series-derived constants.

Point kernels evaluate truncated Taylor series in interval arithmetic and add
the alternating-series remainder (first omitted term) as an explicit
symmetric interval.  Interval arguments are handled through monotonicity of
each function on the supported range, so only endpoint enclosures are needed.

The same arctangent series, instantiated over exact rationals, produces the
pi enclosure (Machin's identity); log 2 comes from two alternating log1p
series.  No platform libm routine is consulted.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from polya.errors import DomainNotSupported
from polya.interval.core import Interval, sqrt

__all__ = [
    "atan",
    "cos",
    "half_pi_enclosure",
    "ln2_enclosure",
    "pi_enclosure",
    "sin",
    "tan",
    "trig",
]

# Remainder target for the point kernels; far below binary64 resolution.
_TAIL = 1e-22
_ATAN_DIRECT_MAX = 0.42


def _atan_series(y, terms: int):
    """Partial sum of atan's Maclaurin series and the first omitted term.

    Works over Interval or Fraction.  For 0 <= y <= 1 the terms decrease, so
    |atan(y) - partial| <= omitted.
    """
    y2 = y * y
    power = y
    total = y
    for k in range(1, terms + 1):
        power = power * y2
        if k % 2:
            total = total - power / (2 * k + 1)
        else:
            total = total + power / (2 * k + 1)
    omitted = power * y2 / (2 * terms + 3)
    return total, omitted


def _atan_rational_bounds(y: Fraction, digits: int = 40) -> tuple[Fraction, Fraction]:
    terms = 1
    while True:
        s, r = _atan_series(y, terms)
        if r < Fraction(1, 10**digits):
            return s - r, s + r
        terms *= 2


@lru_cache(maxsize=None)
def pi_enclosure() -> Interval:
    """pi = 16 atan(1/5) - 4 atan(1/239), evaluated in exact rationals."""
    a_lo, a_hi = _atan_rational_bounds(Fraction(1, 5))
    b_lo, b_hi = _atan_rational_bounds(Fraction(1, 239))
    return Interval.from_fraction_bounds(16 * a_lo - 4 * b_hi, 16 * a_hi - 4 * b_lo)


@lru_cache(maxsize=None)
def half_pi_enclosure() -> Interval:
    return pi_enclosure() / 2


def _log1p_rational_bounds(x: Fraction, digits: int = 40) -> tuple[Fraction, Fraction]:
    # log(1+x) = x - x^2/2 + x^3/3 - ..., alternating and decreasing for 0 < x < 1
    eps = Fraction(1, 10**digits)
    total = Fraction(0)
    power = Fraction(1)
    k = 0
    while True:
        k += 1
        power *= x
        term = power / k
        if term < eps:
            return total - term, total + term
        total += term if k % 2 else -term


@lru_cache(maxsize=None)
def ln2_enclosure() -> Interval:
    """log 2 = log(1 + 1/2) + log(1 + 1/3), both alternating series."""
    a_lo, a_hi = _log1p_rational_bounds(Fraction(1, 2))
    b_lo, b_hi = _log1p_rational_bounds(Fraction(1, 3))
    return Interval.from_fraction_bounds(a_lo + b_lo, a_hi + b_hi)


# -- point kernels ---------------------------------------------------------


def _sin_point(x: float) -> Interval:
    # valid for 0 <= x <= 2: terms x^(2k+1)/(2k+1)! decrease from k = 0
    X = Interval(x)
    X2 = X * X
    term = X
    total = X
    k = 0
    while True:
        k += 1
        term = term * X2 / ((2 * k) * (2 * k + 1))
        total = total - term if k % 2 else total + term
        if term.hi < _TAIL:
            break
    nxt = (term * X2 / ((2 * k + 2) * (2 * k + 3))).hi
    return total + Interval(-nxt, nxt)


def _cos_point(x: float) -> Interval:
    # valid for 0 <= x <= 2: terms x^(2k)/(2k)! decrease from k = 1
    X = Interval(x)
    X2 = X * X
    term = Interval(1.0)
    total = Interval(1.0)
    k = 0
    while True:
        k += 1
        term = term * X2 / ((2 * k - 1) * (2 * k))
        total = total - term if k % 2 else total + term
        if term.hi < _TAIL:
            break
    nxt = (term * X2 / ((2 * k + 1) * (2 * k + 2))).hi
    return total + Interval(-nxt, nxt)


def _atan_small(y: Interval) -> Interval:
    """atan on a sub-interval of [0, 1]."""
    if y.hi > _ATAN_DIRECT_MAX:
        # atan(y) = 2 atan(y / (1 + sqrt(1 + y^2))); maps [0, 1] into [0, 0.4143]
        return 2 * _atan_small(y / (1 + sqrt(1 + y * y)))
    if y.hi == 0.0:
        return Interval(0.0)
    terms = 4
    while True:
        total, omitted = _atan_series(y, terms)
        if omitted.hi < _TAIL:
            break
        terms *= 2
    r = omitted.hi
    return total + Interval(-r, r)


def _atan_point(x: float) -> Interval:
    if x <= 1.0:
        return _atan_small(Interval(x))
    return half_pi_enclosure() - _atan_small(1 / Interval(x))


# -- interval functions ----------------------------------------------------


def _require_first_quadrant(x: Interval, name: str) -> None:
    if x.lo < 0.0 or x.hi >= half_pi_enclosure().hi:
        raise DomainNotSupported(f"{name} supports [0, pi/2) only, got {x}")


def sin(x: Interval) -> Interval:
    _require_first_quadrant(x, "sin")
    lo = max(_sin_point(x.lo).lo, 0.0)
    hi = min(_sin_point(x.hi).hi, 1.0)
    return Interval._raw(lo, hi)


def cos(x: Interval) -> Interval:
    # cos is decreasing on [0, pi], which covers the fuzzy edge near pi/2
    _require_first_quadrant(x, "cos")
    lo = _cos_point(x.hi).lo
    hi = min(_cos_point(x.lo).hi, 1.0)
    return Interval._raw(lo, hi)


def tan(x: Interval) -> Interval:
    if x.lo < 0.0 or x.hi >= half_pi_enclosure().lo:
        raise DomainNotSupported(f"tan supports [0, pi/2) strictly, got {x}")

    def point(t: float) -> Interval:
        c = _cos_point(t)
        if c.lo <= 0.0:
            raise DomainNotSupported(f"tan: cannot separate cos({t!r}) from zero")
        return _sin_point(t) / c

    return Interval._raw(max(point(x.lo).lo, 0.0), point(x.hi).hi)


def atan(x: Interval) -> Interval:
    if x.lo < 0.0:
        raise DomainNotSupported(f"atan supports [0, inf) only, got {x}")
    lo = max(_atan_point(x.lo).lo, 0.0)
    hi = min(_atan_point(x.hi).hi, half_pi_enclosure().hi)
    return Interval._raw(lo, hi)


_TRIG = {"sin": sin, "cos": cos, "tan": tan, "atan": atan}


def trig(fn: str, x: Interval) -> Interval:
    try:
        f = _TRIG[fn]
    except KeyError:
        raise ValueError(f"unknown function {fn!r}") from None
    return f(x)
