"""Closed binary64 intervals with outward rounding.

Every endpoint is produced by a correctly rounded IEEE-754 operation
followed by an exactness test (error-free transformations, or exact
rational comparison when the operands are near the ends of the exponent
range).  Inexact results are moved one ulp outward in the direction the
rounding error says the exact value lies, so the result is the same as
directed rounding without ever touching the FPU rounding mode.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

from polya.errors import (
    DivisionByZeroInterval,
    NegativeBase,
    NonFiniteInput,
    OverflowToNonFinite,
)

__all__ = [
    "Interval",
    "arith",
    "midrad",
    "pow_int",
    "rational_pow",
    "root_and_rational_pow",
    "sqrt",
    "hull",
]

_INF = math.inf
_SPLIT = 134217729.0  # 2**27 + 1, Veltkamp splitter
# Error-free transforms are exact when no intermediate over/underflows.
_SAFE_LO = 2.0**-400
_SAFE_HI = 2.0**400


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _check(x: float) -> float:
    if not math.isfinite(x):
        raise OverflowToNonFinite(f"endpoint left the finite range: {x!r}")
    return x


def _safe(*xs: float) -> bool:
    for x in xs:
        ax = abs(x)
        if not (_SAFE_LO < ax < _SAFE_HI):
            return False
    return True


def _round_pair(r: float, sign: int) -> tuple[float, float]:
    """Bracket an exact value given its rounded image and sign(exact - r)."""
    if sign == 0:
        return r, r
    if sign > 0:
        return r, _check(_up(r))
    return _check(_down(r)), r


def _frac_sign(exact: Fraction, r: float) -> int:
    fr = Fraction(r)
    return (exact > fr) - (exact < fr)


def _two_prod(a: float, b: float) -> tuple[float, float]:
    """Dekker product: a*b == p + e exactly (operands must be _safe)."""
    p = a * b
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLIT * b
    bh = c - (c - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def add_bounds(a: float, b: float) -> tuple[float, float]:
    """Tight floats (lo, hi) with lo <= a + b <= hi."""
    s = _check(a + b)
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return _round_pair(s, (err > 0) - (err < 0))


def mul_bounds(a: float, b: float) -> tuple[float, float]:
    if a == 0.0 or b == 0.0:
        return 0.0, 0.0
    p = _check(a * b)
    if p == 0.0:  # underflow to zero
        return _down(0.0), _up(0.0)
    if _safe(a, b):
        _, e = _two_prod(a, b)
        return _round_pair(p, (e > 0) - (e < 0))
    return _round_pair(p, _frac_sign(Fraction(a) * Fraction(b), p))


def div_bounds(a: float, b: float) -> tuple[float, float]:
    if a == 0.0:
        return 0.0, 0.0
    q = _check(a / b)
    if q == 0.0:
        return _down(0.0), _up(0.0)
    if _safe(a, b, q):
        p, e = _two_prod(q, b)
        d = a - p  # exact (Sterbenz): p is within a factor 2 of a
        rem = (d > e) - (d < e)  # sign(a - q*b)
        sign = rem if b > 0 else -rem
        return _round_pair(q, sign)
    return _round_pair(q, _frac_sign(Fraction(a) / Fraction(b), q))


def sqrt_bounds(x: float) -> tuple[float, float]:
    if x == 0.0:
        return 0.0, 0.0
    r = math.sqrt(x)
    if _safe(x, r):
        p, e = _two_prod(r, r)
        d = x - p
        return _round_pair(r, (d > e) - (d < e))
    fx, fr = Fraction(x), Fraction(r)
    return _round_pair(r, (fx > fr * fr) - (fx < fr * fr))


def _pow_bounds(x: float, k: int) -> tuple[float, float]:
    """Bounds on x**k for x >= 0, k >= 1, by directed binary powering."""
    lo = hi = 1.0
    blo = bhi = x
    while k:
        if k & 1:
            lo = mul_bounds(lo, blo)[0]
            hi = mul_bounds(hi, bhi)[1]
        k >>= 1
        if k:
            blo = mul_bounds(blo, blo)[0]
            bhi = mul_bounds(bhi, bhi)[1]
    return max(lo, 0.0), hi


def _root_bounds(x: float, q: int) -> tuple[float, float]:
    """Floats (lo, hi) with lo**q <= x <= hi**q, verified exactly."""
    if x == 0.0:
        return 0.0, 0.0
    if q == 1:
        return x, x
    if q == 2:
        return sqrt_bounds(x)
    m, e = math.frexp(x)
    k, r = divmod(e, q)
    y = math.ldexp(1.0 + (m * 2.0**r - 1.0) / q, k)
    for _ in range(100):
        yp = y
        for _ in range(q - 2):
            yp *= y
        y_new = ((q - 1) * y + x / yp) / q
        if y_new == y:
            break
        y = y_new
    target = Fraction(x)

    def cmp(v: float) -> int:
        p = Fraction(v) ** q
        return (p > target) - (p < target)

    c = cmp(y)
    if c == 0:
        return y, y
    if c > 0:
        while True:
            prev = _down(y)
            c = cmp(prev)
            if c == 0:
                return prev, prev
            if c < 0:
                return max(prev, 0.0), y
            y = prev
    while True:
        nxt = _up(y)
        c = cmp(nxt)
        if c == 0:
            return nxt, nxt
        if c > 0:
            return y, nxt
        y = nxt


Number = Union[int, float, Fraction, "Interval"]


class Interval:
    """Closed interval [lo, hi] with finite binary64 endpoints.

    Instances are immutable.  Python ``float`` operands are taken at their
    exact binary value; use :meth:`from_decimal` or :meth:`from_fraction`
    for decimal or rational quantities.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise NonFiniteInput(f"non-finite endpoint in [{lo!r}, {hi!r}]")
        if lo > hi:
            raise ValueError(f"empty interval [{lo!r}, {hi!r}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def _raw(cls, lo: float, hi: float) -> "Interval":
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise OverflowToNonFinite(f"endpoint left the finite range: [{lo!r}, {hi!r}]")
        obj = object.__new__(cls)
        object.__setattr__(obj, "lo", lo)
        object.__setattr__(obj, "hi", hi)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    def __reduce__(self):
        return (Interval, (self.lo, self.hi))

    # -- construction -----------------------------------------------------

    @classmethod
    def from_fraction(cls, q: Fraction | int) -> "Interval":
        q = Fraction(q)
        f = float(q)  # correctly rounded
        lo, hi = _round_pair(_check(f), _frac_sign(q, f))
        return cls._raw(lo, hi)

    @classmethod
    def from_fraction_bounds(cls, qlo: Fraction, qhi: Fraction) -> "Interval":
        lo = cls.from_fraction(qlo).lo
        hi = cls.from_fraction(qhi).hi
        return cls._raw(lo, hi)

    @classmethod
    def from_decimal(cls, text) -> "Interval":
        """Smallest enclosure of a decimal literal such as ``"0.33"``."""
        try:
            q = Fraction(str(text).strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise NonFiniteInput(f"not a finite decimal: {text!r}") from exc
        return cls.from_fraction(q)

    @classmethod
    def coerce(cls, x: Number) -> "Interval":
        if isinstance(x, Interval):
            return x
        if isinstance(x, bool):
            raise TypeError("bool is not an interval operand")
        if isinstance(x, int):
            if abs(x) <= 2**53:
                return cls._raw(float(x), float(x))
            return cls.from_fraction(Fraction(x))
        if isinstance(x, float):
            return cls(x, x)
        if isinstance(x, Fraction):
            return cls.from_fraction(x)
        return NotImplemented

    # -- queries -----------------------------------------------------------

    @property
    def mid(self) -> float:
        m = 0.5 * self.lo + 0.5 * self.hi
        return min(max(m, self.lo), self.hi)

    @property
    def width(self) -> float:
        """Upper bound on hi - lo."""
        return add_bounds(self.hi, -self.lo)[1]

    @property
    def rad(self) -> float:
        return mul_bounds(self.width, 0.5)[1]

    def is_thin(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
            return Fraction(self.lo) <= x <= Fraction(self.hi)
        return self.lo <= x <= self.hi

    __contains__ = contains

    def subset(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: "Interval") -> "Interval":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise ValueError(f"disjoint intervals {self} and {other}")
        return Interval._raw(lo, hi)

    def hull(self, other: "Interval") -> "Interval":
        return Interval._raw(min(self.lo, other.lo), max(self.hi, other.hi))

    def certainly_positive(self) -> bool:
        return self.lo > 0.0

    def certainly_negative(self) -> bool:
        return self.hi < 0.0

    def abs(self) -> "Interval":
        if self.lo >= 0.0:
            return self
        if self.hi <= 0.0:
            return -self
        return Interval._raw(0.0, max(-self.lo, self.hi))

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "Interval":
        return Interval._raw(-self.hi, -self.lo)

    def __pos__(self) -> "Interval":
        return self

    def __add__(self, other: Number) -> "Interval":
        o = Interval.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Interval._raw(add_bounds(self.lo, o.lo)[0], add_bounds(self.hi, o.hi)[1])

    __radd__ = __add__

    def __sub__(self, other: Number) -> "Interval":
        o = Interval.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Interval._raw(add_bounds(self.lo, -o.hi)[0], add_bounds(self.hi, -o.lo)[1])

    def __rsub__(self, other: Number) -> "Interval":
        o = Interval.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other: Number) -> "Interval":
        o = Interval.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        a, b = self, o
        if a.lo >= 0.0 and b.lo >= 0.0:
            return Interval._raw(mul_bounds(a.lo, b.lo)[0], mul_bounds(a.hi, b.hi)[1])
        lo = _INF
        hi = -_INF
        for x in (a.lo, a.hi):
            for y in (b.lo, b.hi):
                plo, phi = mul_bounds(x, y)
                if plo < lo:
                    lo = plo
                if phi > hi:
                    hi = phi
        return Interval._raw(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "Interval":
        o = Interval.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.lo <= 0.0 <= o.hi:
            raise DivisionByZeroInterval(f"divisor {o} contains zero")
        a = self
        if a.lo >= 0.0 and o.lo > 0.0:
            return Interval._raw(div_bounds(a.lo, o.hi)[0], div_bounds(a.hi, o.lo)[1])
        lo = _INF
        hi = -_INF
        for x in (a.lo, a.hi):
            for y in (o.lo, o.hi):
                qlo, qhi = div_bounds(x, y)
                if qlo < lo:
                    lo = qlo
                if qhi > hi:
                    hi = qhi
        return Interval._raw(lo, hi)

    def __rtruediv__(self, other: Number) -> "Interval":
        o = Interval.coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __pow__(self, k: int) -> "Interval":
        if not isinstance(k, int):
            return NotImplemented
        return pow_int(self, k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __str__(self) -> str:
        return f"[{self.lo!r}, {self.hi!r}]"


def hull(*xs: Interval) -> Interval:
    return Interval._raw(min(x.lo for x in xs), max(x.hi for x in xs))


_OPS = {
    "add": lambda x, y: x + y,
    "sub": lambda x, y: x - y,
    "mul": lambda x, y: x * y,
    "div": lambda x, y: x / y,
}


def arith(op: str, x: Interval, y: Interval | None = None) -> Interval:
    """Dispatch one of add, sub, mul, div, neg."""
    if op == "neg":
        return -x
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    return fn(x, y)


def midrad(center: float, radius: float) -> Interval:
    """Outward-rounded enclosure of [center - radius, center + radius]."""
    center = float(center)
    radius = float(radius)
    if not (math.isfinite(center) and math.isfinite(radius)):
        raise NonFiniteInput(f"midrad({center!r}, {radius!r})")
    if radius < 0.0:
        raise ValueError("negative radius")
    return Interval._raw(add_bounds(center, -radius)[0], add_bounds(center, radius)[1])


def pow_int(x: Interval, k: int) -> Interval:
    """Tight enclosure of {t**k : t in x}; even powers of sign-straddling x start at 0."""
    if k == 0:
        return Interval._raw(1.0, 1.0)
    if k < 0:
        if x.lo <= 0.0 <= x.hi:
            raise DivisionByZeroInterval(f"negative power of {x}, which contains zero")
        return 1.0 / pow_int(x, -k)
    if k == 1:
        return x
    if x.lo >= 0.0:
        return Interval._raw(_pow_bounds(x.lo, k)[0], _pow_bounds(x.hi, k)[1])
    if x.hi <= 0.0:
        lo, hi = _pow_bounds(-x.hi, k)[0], _pow_bounds(-x.lo, k)[1]
        if k % 2 == 0:
            return Interval._raw(lo, hi)
        return Interval._raw(-hi, -lo)
    left = _pow_bounds(-x.lo, k)[1]
    right = _pow_bounds(x.hi, k)[1]
    if k % 2 == 0:
        return Interval._raw(0.0, max(left, right))
    return Interval._raw(-left, right)


def rational_pow(x: Interval, p: int, q: int) -> Interval:
    """Enclosure of x**(p/q) for x >= 0, via verified q-th roots."""
    if q < 1:
        raise ValueError("q must be a positive integer")
    if x.lo < 0.0:
        raise NegativeBase(f"rational power of {x}, which has a negative part")
    if p < 0:
        if x.lo == 0.0:
            raise DivisionByZeroInterval(f"negative power of {x}, which contains zero")
        return 1.0 / rational_pow(x, -p, q)
    if p == 0:
        return Interval._raw(1.0, 1.0)
    rlo = _root_bounds(x.lo, q)[0]
    rhi = _root_bounds(x.hi, q)[1]
    if p == 1:
        return Interval._raw(rlo, rhi)
    return Interval._raw(_pow_bounds(rlo, p)[0], _pow_bounds(rhi, p)[1])


root_and_rational_pow = rational_pow


def sqrt(x: Interval) -> Interval:
    return rational_pow(x, 1, 2)
