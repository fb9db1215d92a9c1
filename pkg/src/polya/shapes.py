"""Shape families and conversions between their normalizations.

Angles are the canonical parameters; every length is derived from them in
interval arithmetic.  Two triangle normalizations are used: ``BASE2`` (base
of length 2, height d = tan(beta), area d) and ``HEIGHT1`` (height 1,
half-base tan(alpha/2), area tan(alpha/2)).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from polya.errors import DomainNotSupported, ShapeSpecError
from polya.interval import Interval, atan, half_pi_enclosure, pi_enclosure, tan

__all__ = [
    "ConvexSlabSpec",
    "Disc",
    "IsoscelesTriangle",
    "Normalization",
    "Rectangle",
    "Rhombus",
    "Sector",
    "equal_area_sector",
    "parse_shape",
    "rhombus_d",
    "rhombus_from_beta",
    "rhombus_from_d",
    "triangle_d",
    "triangle_from_alpha",
    "triangle_from_beta",
]


class Normalization(str, enum.Enum):
    BASE2 = "Base2"
    HEIGHT1 = "Height1"


def _as_interval(x) -> Interval:
    if isinstance(x, Interval):
        return x
    if isinstance(x, str):
        return Interval.from_decimal(x)
    return Interval.coerce(x)


@dataclass(frozen=True)
class IsoscelesTriangle:
    """Isosceles triangle with base angles beta and apex angle alpha = pi - 2 beta."""

    alpha: Interval
    beta: Interval
    normalization: Normalization = Normalization.BASE2

    @property
    def height(self) -> Interval:
        if self.normalization is Normalization.HEIGHT1:
            return Interval(1.0)
        return triangle_d(self)

    @property
    def half_base(self) -> Interval:
        if self.normalization is Normalization.HEIGHT1:
            return tan(self.alpha / 2)
        return Interval(1.0)

    @property
    def area(self) -> Interval:
        return self.height * self.half_base

    def vertices(self) -> list[tuple[float, float]]:
        """Counterclockwise float vertices (base on the x axis, apex on the y axis)."""
        b = self.half_base.mid
        h = self.height.mid
        return [(-b, 0.0), (b, 0.0), (0.0, h)]

    def with_normalization(self, normalization: Normalization) -> "IsoscelesTriangle":
        return IsoscelesTriangle(self.alpha, self.beta, Normalization(normalization))


def triangle_from_beta(beta, normalization: Normalization = Normalization.BASE2) -> IsoscelesTriangle:
    beta = _as_interval(beta)
    if beta.lo <= 0.0 or beta.hi >= half_pi_enclosure().hi:
        raise DomainNotSupported(f"base angle must lie in (0, pi/2), got {beta}")
    alpha = pi_enclosure() - 2 * beta
    alpha = Interval(max(alpha.lo, 0.0), min(alpha.hi, pi_enclosure().hi))
    return IsoscelesTriangle(alpha=alpha, beta=beta, normalization=Normalization(normalization))


def triangle_from_alpha(alpha, normalization: Normalization = Normalization.HEIGHT1) -> IsoscelesTriangle:
    alpha = _as_interval(alpha)
    if alpha.lo <= 0.0 or alpha.hi >= pi_enclosure().hi:
        raise DomainNotSupported(f"apex angle must lie in (0, pi), got {alpha}")
    beta = (pi_enclosure() - alpha) / 2
    beta = Interval(max(beta.lo, 0.0), min(beta.hi, half_pi_enclosure().hi))
    return IsoscelesTriangle(alpha=alpha, beta=beta, normalization=Normalization(normalization))


def triangle_d(t: IsoscelesTriangle) -> Interval:
    """Height of the base-2 triangle, d = tan(beta)."""
    return tan(t.beta)


@dataclass(frozen=True)
class Rhombus:
    """Rhombus with acute angle beta and diagonals 2 and d = 2 tan(beta/2)."""

    beta: Interval
    d: Interval

    @property
    def area(self) -> Interval:
        return self.d

    @property
    def side(self) -> Interval:
        from polya.interval import sqrt

        return sqrt(1 + self.d * self.d / 4)

    def vertices(self) -> list[tuple[float, float]]:
        h = self.d.mid / 2
        return [(-1.0, 0.0), (0.0, -h), (1.0, 0.0), (0.0, h)]


def rhombus_from_beta(beta) -> Rhombus:
    beta = _as_interval(beta)
    if beta.lo <= 0.0 or beta.lo > half_pi_enclosure().hi:
        raise DomainNotSupported(f"rhombus angle must lie in (0, pi/2], got {beta}")
    beta = Interval(beta.lo, min(beta.hi, half_pi_enclosure().hi))
    d = 2 * tan(beta / 2)
    # beta <= pi/2 forces d <= 2 exactly
    d = Interval(d.lo, min(d.hi, 2.0))
    return Rhombus(beta=beta, d=d)


def rhombus_from_d(d) -> Rhombus:
    d = _as_interval(d)
    if d.lo <= 0.0 or d.hi > 2.0:
        raise DomainNotSupported(f"rhombus minor diagonal must lie in (0, 2], got {d}")
    beta = 2 * atan(d / 2)
    return Rhombus(beta=beta, d=d)


def rhombus_d(r: Rhombus) -> Interval:
    return r.d


@dataclass(frozen=True)
class Sector:
    """Circular sector S(rho, alpha) with opening angle alpha, symmetric about the x axis."""

    rho: Interval
    alpha: Interval

    def __post_init__(self):
        if self.rho.lo <= 0.0:
            raise DomainNotSupported(f"sector radius must be positive, got {self.rho}")
        if self.alpha.lo <= 0.0 or self.alpha.hi >= half_pi_enclosure().hi:
            raise DomainNotSupported(f"sector opening must lie in (0, pi/2), got {self.alpha}")

    @property
    def area(self) -> Interval:
        return self.rho * self.rho * self.alpha / 2


def equal_area_sector(t: IsoscelesTriangle) -> Sector:
    """Sector with the triangle's apex angle and area (base-2 triangle: rho^2 = 2/(alpha tan(alpha/2)))."""
    from polya.interval import sqrt

    rho2 = 2 * t.area / t.alpha
    return Sector(rho=sqrt(rho2), alpha=t.alpha)


@dataclass(frozen=True)
class ConvexSlabSpec:
    """Data of an m-dimensional convex set used by the thinning bound.

    ``w`` is the width; ``rho_section`` is the inradius of the central
    section parallel to the supporting hyperplanes.
    """

    m: int
    w: Interval
    rho_section: Interval

    def __post_init__(self):
        if self.m < 2:
            raise DomainNotSupported("ambient dimension must be at least 2")
        if self.w.lo <= 0.0 or self.rho_section.lo <= 0.0:
            raise DomainNotSupported("width and section inradius must be positive")


@dataclass(frozen=True)
class Rectangle:
    a: float
    b: float

    @property
    def area(self) -> float:
        return self.a * self.b

    def vertices(self) -> list[tuple[float, float]]:
        return [(0.0, 0.0), (self.a, 0.0), (self.a, self.b), (0.0, self.b)]


@dataclass(frozen=True)
class Disc:
    r: float


# -- text specs ------------------------------------------------------------

_SPEC_RE = re.compile(r"^\s*([a-z]+)\s*:\s*(.*)$")


def _parse_params(body: str) -> dict[str, str]:
    out = {}
    for part in filter(None, (p.strip() for p in body.split(","))):
        if "=" not in part:
            raise ShapeSpecError(f"expected key=value, got {part!r}")
        k, v = (s.strip() for s in part.split("=", 1))
        out[k] = v
    return out


def parse_shape(text: str):
    """Parse ``kind:key=value,...`` into a shape object.

    Recognised kinds: triangle (beta= or alpha=, optional norm=Base2|Height1),
    rhombus (beta= or d=), sector (rho=, alpha=), slab (m=, w=, rho=),
    rect (a=, b=), disc (r=).  Decimal values become enclosing intervals.
    """
    m = _SPEC_RE.match(text)
    if not m:
        raise ShapeSpecError(f"cannot parse shape spec {text!r}")
    kind, params = m.group(1), _parse_params(m.group(2))

    def take(*names, required=True):
        for n in names:
            if n in params:
                return params.pop(n)
        if required:
            raise ShapeSpecError(f"{kind}: missing parameter {'/'.join(names)}")
        return None

    try:
        if kind == "triangle":
            norm = take("norm", required=False)
            if "alpha" in params:
                shape = triangle_from_alpha(take("alpha"), Normalization(norm or "Base2"))
            else:
                shape = triangle_from_beta(take("beta"), Normalization(norm or "Base2"))
        elif kind == "rhombus":
            if "d" in params:
                shape = rhombus_from_d(take("d"))
            else:
                shape = rhombus_from_beta(take("beta"))
        elif kind == "sector":
            shape = Sector(rho=Interval.from_decimal(take("rho")), alpha=Interval.from_decimal(take("alpha")))
        elif kind == "slab":
            shape = ConvexSlabSpec(
                m=int(take("m")),
                w=Interval.from_decimal(take("w")),
                rho_section=Interval.from_decimal(take("rho")),
            )
        elif kind in ("rect", "rectangle"):
            shape = Rectangle(float(take("a")), float(take("b")))
        elif kind == "disc":
            shape = Disc(float(take("r", "R")))
        else:
            raise ShapeSpecError(f"unknown shape kind {kind!r}")
    except (ValueError, DomainNotSupported) as exc:
        if isinstance(exc, ShapeSpecError):
            raise
        raise ShapeSpecError(f"{text!r}: {exc}") from exc
    if params:
        raise ShapeSpecError(f"{kind}: unexpected parameters {sorted(params)}")
    return shape
