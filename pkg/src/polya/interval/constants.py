"""Certified constants: pi, zeta(5), Bessel zeros and the derived C, C1, C2."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from polya.errors import UnsupportedOrder
from polya.interval.core import Interval, rational_pow
from polya.interval.elementary import ln2_enclosure, pi_enclosure

__all__ = [
    "ConstantTable",
    "bessel_j0_enclosure",
    "bessel_zero_enclosure",
    "constants",
    "constants_json",
    "zeta5_enclosure",
]

# J0 changes sign once on this bracket; J0 is decreasing on (0, 3.83).
_J0_BRACKET = (2.3, 2.5)


def zeta5_enclosure(n_terms: int = 500) -> Interval:
    """Partial sum of n^-5 plus the integral tail bounds.

    sum_{n>N} n^-5 lies in [1/(4(N+1)^4), 1/(4N^4)].
    """
    if n_terms < 1:
        raise ValueError("n_terms must be positive")
    total = Interval(0.0)
    for n in range(n_terms, 0, -1):
        total = total + Interval.from_fraction(Fraction(1, n**5))
    tail = Interval.from_fraction_bounds(
        Fraction(1, 4 * (n_terms + 1) ** 4), Fraction(1, 4 * n_terms**4)
    )
    return total + tail


def bessel_j0_enclosure(x: float) -> Interval:
    """J0(x) for 0 <= x <= 2.5 from its power series.

    With y = x^2/4 <= 1.5625 the terms y^k/(k!)^2 decrease from k = 1 on,
    so the first omitted term bounds the remainder.
    """
    if not 0.0 <= x <= 2.5:
        raise ValueError("series kernel is certified on [0, 2.5] only")
    X = Interval(x)
    y = X * X / 4
    term = Interval(1.0)
    total = Interval(1.0)
    k = 0
    while True:
        k += 1
        term = term * y / (k * k)
        total = total - term if k % 2 else total + term
        if term.hi < 1e-22:
            break
    r = (term * y / ((k + 1) * (k + 1))).hi
    return total + Interval(-r, r)


@lru_cache(maxsize=None)
def _j0_first_zero(tol: float = 1e-13) -> Interval:
    a, b = _J0_BRACKET
    if not (bessel_j0_enclosure(a).lo > 0.0 and bessel_j0_enclosure(b).hi < 0.0):
        raise ArithmeticError("J0 bracket failed to certify a sign change")
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        v = bessel_j0_enclosure(m)
        if v.lo > 0.0:
            a = m
        elif v.hi < 0.0:
            b = m
        else:
            break  # sign undecidable at this resolution; [a, b] still brackets
    return Interval(a, b)


def bessel_zero_enclosure(nu) -> Interval:
    """First positive zero of J_nu for nu in {-1/2, 0, 1/2}."""
    nu = Fraction(nu)
    if nu == Fraction(-1, 2):
        return pi_enclosure() / 2  # J_{-1/2}(x) ~ cos(x)/sqrt(x)
    if nu == Fraction(1, 2):
        return pi_enclosure()  # J_{1/2}(x) ~ sin(x)/sqrt(x)
    if nu == 0:
        return _j0_first_zero()
    raise UnsupportedOrder(f"no certified zero for Bessel order {nu}")


@dataclass(frozen=True)
class ConstantTable:
    pi: Interval
    zeta5: Interval
    airy_C: Interval
    c1: Interval
    c2: Interval
    ln2: Interval
    bessel_zero: dict = field(default_factory=dict)

    def named(self) -> dict[str, Interval]:
        out = {
            "pi": self.pi,
            "zeta5": self.zeta5,
            "airy_C": self.airy_C,
            "c1": self.c1,
            "c2": self.c2,
            "ln2": self.ln2,
        }
        for nu, j in sorted(self.bessel_zero.items()):
            out[f"bessel_zero[{nu}]"] = j
        return out


@lru_cache(maxsize=None)
def constants() -> ConstantTable:
    pi = pi_enclosure()
    zeta5 = zeta5_enclosure()
    # C = (9 pi / 8)^(2/3) 2^(-1/3), C1 = (9/4)^(2/3), C2 = 2^2 3^4 31 zeta(5) / (5^2 pi^5)
    airy_C = rational_pow(9 * pi / 8, 2, 3) / rational_pow(Interval(2.0), 1, 3)
    c1 = rational_pow(Interval(2.25), 2, 3)
    c2 = (4 * 81 * 31) * zeta5 / (25 * pi**5)
    zeros = {nu: bessel_zero_enclosure(nu) for nu in (Fraction(-1, 2), Fraction(0), Fraction(1, 2))}
    return ConstantTable(pi=pi, zeta5=zeta5, airy_C=airy_C, c1=c1, c2=c2, ln2=ln2_enclosure(), bessel_zero=zeros)


def constants_json(table: ConstantTable | None = None) -> str:
    """Audit dump: name -> {lo_hex, hi_hex, lo_dec, hi_dec}."""
    table = table or constants()
    doc = {
        name: {
            "lo_hex": iv.lo.hex(),
            "hi_hex": iv.hi.hex(),
            "lo_dec": repr(iv.lo),
            "hi_dec": repr(iv.hi),
        }
        for name, iv in table.named().items()
    }
    return json.dumps(doc, indent=2, sort_keys=True)
