"""Certified interval evaluators for the closed-form bounds.

Every public evaluator returns a :class:`BoundResult` (or a bare
:class:`Interval` for building blocks used by the certifier).  The
``valid`` flag records whether the argument lies inside the hypothesis of
the corresponding theorem; results with ``valid=False`` are exploratory and
carry the reason.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from polya.errors import DomainNotSupported, UnsupportedOrder
from polya.interval import (
    Interval,
    bessel_zero_enclosure,
    constants,
    cos,
    half_pi_enclosure,
    pi_enclosure,
    rational_pow,
    sin,
    sqrt,
    tan,
)
from polya.shapes import ConvexSlabSpec, IsoscelesTriangle, Rhombus, Sector

__all__ = [
    "BoundResult",
    "Kind",
    "Quantity",
    "G_area",
    "G_enclosure",
    "G_lambda_lower",
    "G_torsion_lower",
    "auxiliary_published_bounds",
    "certified_sandwich",
    "denominator_lemma_margin",
    "e26_simplification_margin",
    "lambda_upper_e20",
    "lambda_upper_e26",
    "odd_series_partial",
    "rhombus_lambda_lower",
    "rhombus_lower_excess",
    "rhombus_lower_factor",
    "rhombus_ratio_lower",
    "rhombus_ratio_upper",
    "rhombus_torsion_lower",
    "rhombus_upper_chain",
    "sector_torsion_enclosure",
    "sector_torsion_pointwise",
    "series_tail_bound",
    "t11_margin",
    "theorem1_upper",
    "triangle_ratio_lower_G",
    "triangle_ratio_lower_narrow",
    "triangle_ratio_lower_wide",
    "triangle_ratio_upper",
    "triangle_upper_chain",
]


class Kind(str, enum.Enum):
    UPPER = "UpperBound"
    LOWER = "LowerBound"


class Quantity(str, enum.Enum):
    LAMBDA_M = "LambdaM"
    POLYA_RATIO = "PolyaRatio"
    TORSION = "Torsion"
    LAMBDA = "Lambda"


def _jsonable(v: Any) -> Any:
    if isinstance(v, Interval):
        return {"lo": v.lo, "hi": v.hi}
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, enum.Enum):
        return v.value
    return v


@dataclass(frozen=True)
class BoundResult:
    value: Interval
    kind: Kind
    quantity: Quantity
    equation_tag: str
    valid: bool
    reason: str = ""
    params: dict = field(default_factory=dict)
    parts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        doc = {
            "equation_tag": self.equation_tag,
            "kind": self.kind.value,
            "quantity": self.quantity.value,
            "lo": self.value.lo,
            "hi": self.value.hi,
            "valid": self.valid,
            "params": {k: _jsonable(v) for k, v in self.params.items()},
        }
        if self.reason:
            doc["reason"] = self.reason
        return doc


def _pi() -> Interval:
    return pi_enclosure()


def _pi2_over_24() -> Interval:
    pi = _pi()
    return pi * pi / 24


def _third() -> Interval:
    return _pi() / 3


_33_OVER_100 = Interval.from_fraction(Fraction(33, 100))


def _within_pi_over_3(x: Interval) -> bool:
    # the pi/3 cell itself is admitted: the hypotheses include pi/3
    return x.lo > 0.0 and x.hi <= _third().hi


def _require_acute(x: Interval, name: str) -> None:
    if x.lo <= 0.0 or x.hi >= half_pi_enclosure().lo:
        raise DomainNotSupported(f"{name} must lie in (0, pi/2), got {x}")


# -- sector torsion -----------------------------------------------------------


def sector_torsion_pointwise(r: Interval, phi: Interval, beta: Interval) -> Interval:
    """Torsion function of the infinite sector of opening beta, (r^2/4)(cos 2phi / cos beta - 1)."""
    _require_acute(beta, "sector opening")
    if r.lo < 0.0:
        raise DomainNotSupported("radius must be nonnegative")
    aphi = phi.abs()
    half = beta / 2
    if aphi.lo > half.hi:
        raise DomainNotSupported(f"|phi| = {aphi} exceeds half the opening {half}")
    value = (r * r / 4) * (cos(2 * aphi) / cos(beta) - 1)
    if aphi.hi <= half.lo and value.lo < 0.0:
        value = Interval(0.0, max(value.hi, 0.0))  # v >= 0 inside the sector
    return value


def odd_series_partial(alpha: Interval, terms: int) -> Interval:
    """sum_{n=0}^{terms} (2n+1)^-2 (2n+1+u)^-2 (2n+1-u)^-1 with u = 2 alpha / pi."""
    u = 2 * alpha / _pi()
    total = Interval(0.0)
    for n in range(terms, -1, -1):
        k = 2 * n + 1
        p = k + u
        total = total + 1 / ((k * k) * (p * p) * (k - u))
    return total


def series_tail_bound(terms: int) -> Interval:
    """Enclosure of 1/(2^7 N^4), which bounds the omitted part of the odd series."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    return Interval.from_fraction(Fraction(1, 2**7 * terms**4))


def sector_torsion_enclosure(s: Sector, terms: int = 10) -> Interval:
    """Two-sided enclosure of the torsional rigidity of the sector S(rho, alpha).

    T = (rho^4/16) (tan a - a - (128 a^4 / pi^5) * sigma(a)); sigma is
    enclosed by [partial sum, partial sum + 1/(2^7 N^4)].
    """
    a = s.alpha
    _require_acute(a, "sector opening")
    if terms < 1:
        raise ValueError("terms must be >= 1")
    partial = odd_series_partial(a, terms)
    sigma = Interval(partial.lo, (partial + series_tail_bound(terms)).hi)
    pi = _pi()
    rho4 = s.rho**4
    return rho4 / 16 * (tan(a) - a - 128 * a**4 / pi**5 * sigma)


def denominator_lemma_margin(n: int, alpha_max: Interval | None = None) -> Interval:
    """(n + u)^2 (n - u) - (25/27) n^3 at the largest u = 2 alpha / pi.

    For fixed n the left side decreases in u on [0, 2/3], so a nonnegative
    lower endpoint at alpha_max = pi/3 certifies the lemma for that n.
    """
    alpha_max = alpha_max if alpha_max is not None else _third()
    u = 2 * alpha_max / _pi()
    return (n + u) ** 2 * (n - u) - Interval.from_fraction(Fraction(25, 27)) * n**3


# -- triangles: upper bound -------------------------------------------------------


def triangle_upper_chain(d: Interval) -> Interval:
    """(pi^2/24)(1 + d^2)^2 (1 + 7 (d/2)^(2/3)) for the base-2 triangle of height d."""
    return _pi2_over_24() * (1 + d * d) ** 2 * (1 + 7 * rational_pow(d / 2, 2, 3))


def triangle_ratio_upper(t: IsoscelesTriangle) -> BoundResult:
    beta = t.beta
    _require_acute(beta, "base angle")
    tb = tan(beta)
    value = _pi2_over_24() * (1 + 81 * rational_pow(tb, 2, 3))
    valid = _within_pi_over_3(beta)
    d = tb  # base-2 height
    pi = _pi()
    torsion_up = (1 + d * d) ** 2 * (tb - beta) / 8
    lambda_up = pi * pi / (d * d) * (1 + 7 * rational_pow(d / 2, 2, 3))
    return BoundResult(
        value=value,
        kind=Kind.UPPER,
        quantity=Quantity.POLYA_RATIO,
        equation_tag="e28",
        valid=valid,
        reason="" if valid else "requires 0 < beta <= pi/3",
        params={"beta": beta},
        parts={
            "torsion_upper_e31": torsion_up,
            "torsion_upper_e31_cubic": d**3 * (1 + d * d) ** 2 / 24,
            "lambda_upper_e33": lambda_up,
            "ratio_direct": torsion_up * lambda_up / d,
            "ratio_chain": triangle_upper_chain(d),
        },
    )


# -- rhombi: upper and lower bounds ------------------------------------------------


def rhombus_upper_chain(d: Interval) -> Interval:
    """(pi^2/24)(1 + d^2/4)^2 (1 + 9 d^2/32)(1 + 7 (d/2)^(2/3))."""
    d2 = d * d
    return (
        _pi2_over_24()
        * (1 + d2 / 4) ** 2
        * (1 + 9 * d2 / 32)
        * (1 + 7 * rational_pow(d / 2, 2, 3))
    )


def rhombus_ratio_upper(r: Rhombus) -> BoundResult:
    beta = r.beta
    _require_acute(beta, "rhombus angle")
    value = _pi2_over_24() * (1 + 15 * rational_pow(tan(beta), 2, 3))
    valid = _within_pi_over_3(beta)
    d = r.d
    pi = _pi()
    R4 = (1 + d * d / 4) ** 2
    torsion_up = R4 * (tan(beta) - beta) / 8
    lambda_up = pi * pi / (d * d) * (1 + 7 * rational_pow(d / 2, 2, 3))
    return BoundResult(
        value=value,
        kind=Kind.UPPER,
        quantity=Quantity.POLYA_RATIO,
        equation_tag="e28a",
        valid=valid,
        reason="" if valid else "requires 0 < beta <= pi/3",
        params={"beta": beta},
        parts={
            "torsion_upper": torsion_up,
            "lambda_upper": lambda_up,
            "ratio_direct": torsion_up * lambda_up / d,
            "ratio_chain": rhombus_upper_chain(d),
        },
    )


def rhombus_torsion_lower(d: Interval) -> Interval:
    """d^3 / (24 + 18 d^2), from the piecewise-quadratic test function."""
    return d**3 / (24 + 18 * d * d)


def rhombus_lambda_lower(d: Interval) -> Interval:
    """pi^2 (16 + 24 d^2 + d^4) / (d^2 (16 + 4 d^2)), the Steiner-rectangle eigenvalue."""
    pi = _pi()
    d2 = d * d
    return pi * pi * (16 + 24 * d2 + d2 * d2) / (d2 * (16 + 4 * d2))


def rhombus_lower_factor(d: Interval) -> Interval:
    """(16 + 24 d^2 + d^4) / ((1 + 3 d^2/4)(16 + 4 d^2))."""
    d2 = d * d
    return (16 + 24 * d2 + d2 * d2) / ((1 + 3 * d2 / 4) * (16 + 4 * d2))


def rhombus_lower_excess(d: Interval) -> Interval:
    """rhombus_lower_factor(d) - 1.

    Intersects the direct evaluation with the equivalent reduced form
    2 d^2 (4 - d^2) / (16 + 16 d^2 + 3 d^4), which has no cancellation and
    is exactly zero at d = 2.
    """
    d2 = d * d
    direct = rhombus_lower_factor(d) - 1
    reduced = 2 * d2 * (4 - d2) / (16 + 16 * d2 + 3 * d2 * d2)
    return direct.intersect(reduced)


def _check_d(d: Interval) -> None:
    if d.lo <= 0.0 or d.hi > 2.0:
        raise DomainNotSupported(f"minor diagonal must lie in (0, 2], got {d}")


def rhombus_ratio_lower(r: Rhombus) -> BoundResult:
    d = r.d
    _check_d(d)
    factor = rhombus_lower_factor(d)
    value = _pi2_over_24() * factor
    return BoundResult(
        value=value,
        kind=Kind.LOWER,
        quantity=Quantity.POLYA_RATIO,
        equation_tag="e28b",
        valid=True,
        params={"d": d},
        parts={
            "factor": factor,
            "excess": rhombus_lower_excess(d),
            "torsion_lower": rhombus_torsion_lower(d),
            "lambda_lower": rhombus_lambda_lower(d),
        },
    )


# -- triangles: lower bounds ------------------------------------------------------


def triangle_ratio_lower_wide(t: IsoscelesTriangle) -> BoundResult:
    """Lower bound pi^2/24 for apex angles alpha in [pi/3, pi).

    The torsion factor (1/24)(1 + 1/d^2)^-1 and the eigenvalue factor
    pi^2 (1 + 1/d^2) cancel exactly, so the value is the pi^2/24 enclosure.
    """
    beta = t.beta
    _require_acute(beta, "base angle")
    d = tan(beta)
    pi = _pi()
    inv = 1 + 1 / (d * d)
    lam = pi * pi * inv
    lam_alt = 4 * pi * pi / (d * d)
    valid = _within_pi_over_3(beta)
    return BoundResult(
        value=_pi2_over_24(),
        kind=Kind.LOWER,
        quantity=Quantity.POLYA_RATIO,
        equation_tag="T2-L1",
        valid=valid,
        reason="" if valid else "requires apex angle >= pi/3",
        params={"beta": beta},
        parts={
            "d": d,
            "torsion_factor": 1 / (24 * inv),
            "torsion_lower_T1": d**3 / (24 * (1 + d * d)),  # T >= 2 d^3 / (48 (1 + d^2))
            "lambda_factor": lam,
            "lambda_branch_4pi2_d2": lam_alt,
            "l1_branch_gap": lam_alt - lam,  # pi^2 (3 - d^2)/d^2 >= 0 iff d <= sqrt 3
        },
    )


def t11_margin(alpha: Interval) -> Interval:
    """C1 - C1 C2 alpha - C2 alpha^(1/3)."""
    if alpha.lo < 0.0:
        raise DomainNotSupported("alpha must be nonnegative")
    c = constants()
    return c.c1 - c.c1 * c.c2 * alpha - c.c2 * rational_pow(alpha, 1, 3)


def triangle_ratio_lower_narrow(alpha: Interval) -> BoundResult:
    """(pi^2/24)(1 - C2 alpha)(1 + C1 alpha^(2/3)) for small apex angle alpha."""
    _require_acute(alpha, "apex angle")
    c = constants()
    pi = _pi()
    a23 = rational_pow(alpha, 2, 3)
    value = _pi2_over_24() * (1 - c.c2 * alpha) * (1 + c.c1 * a23)
    valid = alpha.lo > 0.0 and alpha.hi <= _33_OVER_100.lo
    th = tan(alpha / 2)
    rho2 = 2 / (alpha * th)
    j2_lower = (pi / alpha) ** 2 * (1 + c.c1 * a23)
    j2_lower_airy = (pi / alpha) ** 2 * (1 + c.airy_C * rational_pow(alpha / pi, 2, 3)) ** 2
    kappa = c.c2 / 3  # 2^2 3^3 31 zeta(5) / (25 pi^5)
    return BoundResult(
        value=value,
        kind=Kind.LOWER,
        quantity=Quantity.POLYA_RATIO,
        equation_tag="finalestimate",
        valid=valid,
        reason="" if valid else "requires 0 < alpha <= 33/100",
        params={"alpha": alpha},
        parts={
            "area": 1 / th,
            "rho2": rho2,
            "bessel_zero_sq_lower": j2_lower,
            "bessel_zero_sq_lower_airy": j2_lower_airy,
            "siudeja_lambda_lower": alpha * th / 2 * j2_lower,
            "torsion_lower_T4_series": rho2 * rho2 / 16 * (tan(alpha) - alpha - kappa * alpha**4),
            "torsion_lower_T4": alpha**3 * rho2 * rho2 / 48 * (1 - c.c2 * alpha),
            "t11_margin": t11_margin(alpha),
        },
    )


# -- the function G -----------------------------------------------------------------


def G_lambda_lower(alpha: Interval) -> Interval:
    """cos^2(alpha/2) (alpha / sin alpha) (pi/alpha + C (pi/alpha)^(1/3))^2."""
    c = constants()
    pa = _pi() / alpha
    return cos(alpha / 2) ** 2 * (alpha / sin(alpha)) * (pa + c.airy_C * rational_pow(pa, 1, 3)) ** 2


def G_torsion_lower(alpha: Interval, terms: int = 10) -> Interval:
    """(1/16)(tan a - a) - (8/pi^5) a^4 (partial sum + 1/(2^7 N^4)) for the height-1 tangent sector."""
    pi = _pi()
    s = odd_series_partial(alpha, terms) + series_tail_bound(terms)
    return (tan(alpha) - alpha) / 16 - 8 * alpha**4 / pi**5 * s


def G_area(alpha: Interval) -> Interval:
    return tan(alpha / 2)


def G_enclosure(alpha: Interval, terms: int = 10) -> Interval:
    """(24/pi^2) * lambda_lower * torsion_lower / area for the height-1 triangle."""
    _require_acute(alpha, "apex angle")
    if terms < 1:
        raise ValueError("terms must be >= 1")
    pi = _pi()
    return 24 / (pi * pi) * G_lambda_lower(alpha) * G_torsion_lower(alpha, terms) / G_area(alpha)


def triangle_ratio_lower_G(t: IsoscelesTriangle, terms: int = 10) -> BoundResult:
    """Ratio lower bound lambda_lower * torsion_lower / area for apex angles in (0, pi/3]."""
    alpha = t.alpha
    _require_acute(alpha, "apex angle")
    lam = G_lambda_lower(alpha)
    tor = G_torsion_lower(alpha, terms)
    area = G_area(alpha)
    value = lam * tor / area
    valid = _within_pi_over_3(alpha)
    return BoundResult(
        value=value,
        kind=Kind.LOWER,
        quantity=Quantity.POLYA_RATIO,
        equation_tag="G",
        valid=valid,
        reason="" if valid else "sector comparison requires apex angle <= pi/3",
        params={"alpha": alpha, "terms": terms},
        parts={"lambda_lower": lam, "torsion_lower": tor, "area": area, "G": G_enclosure(alpha, terms)},
    )


# -- thin convex sets ---------------------------------------------------------------


def lambda_upper_e20(w: Interval, lambda_c: Interval) -> Interval:
    """(pi^2/w^2)(1 + 3 s + 3 s^2 + s^3) with s = (lambda_c w^2 / pi^2)^(1/3)."""
    pi2 = _pi() ** 2
    s = rational_pow(lambda_c * w * w / pi2, 1, 3)
    return pi2 / (w * w) * (1 + 3 * s + 3 * s * s + s**3)


def _bessel_K(m: int) -> Interval:
    j = bessel_zero_enclosure(Fraction(m - 3, 2))
    return (m + 1) ** 2 * j * j / _pi() ** 2


def lambda_upper_e26(w: Interval, lambda_c: Interval, m: int) -> Interval:
    """(pi^2/w^2)(1 + 7 K^(2/3) (lambda_c w^2/pi^2)^(1/3)), K = (m+1)^2 j^2 / pi^2."""
    pi2 = _pi() ** 2
    K = _bessel_K(m)
    s = rational_pow(lambda_c * w * w / pi2, 1, 3)
    return pi2 / (w * w) * (1 + 7 * rational_pow(K, 2, 3) * s)


def e26_simplification_margin(m: int) -> Interval:
    """7 K^(2/3) - (3 + 3 K^(1/3) + K^(2/3)); nonnegative whenever K >= 1."""
    K = _bessel_K(m)
    k13 = rational_pow(K, 1, 3)
    k23 = rational_pow(K, 2, 3)
    return 7 * k23 - (3 + 3 * k13 + k23)


def theorem1_upper(s: ConvexSlabSpec) -> BoundResult:
    """lambda M <= (pi^2/8)(1 + d_m (w/rho)^(2/3)), d_m = 7 (m+1)^(4/3) j^2 / pi^2."""
    m = s.m
    if m not in (2, 3, 4):
        raise UnsupportedOrder(f"Bessel zero j_{{(m-3)/2}} is certified only for m in 2..4, got m={m}")
    pi = _pi()
    j = bessel_zero_enclosure(Fraction(m - 3, 2))
    d_m = 7 * rational_pow(Interval(float(m + 1)), 4, 3) * j * j / (pi * pi)
    w, rho = s.w, s.rho_section
    value = pi * pi / 8 * (1 + d_m * rational_pow(w / rho, 2, 3))
    lam_c_e24 = j * j / (rho * rho)
    lam_c_e25 = (m + 1) ** 2 * j * j / (w * w)
    K = _bessel_K(m)
    return BoundResult(
        value=value,
        kind=Kind.UPPER,
        quantity=Quantity.LAMBDA_M,
        equation_tag="e15",
        valid=True,
        params={"m": m, "w": w, "rho": rho},
        parts={
            "d_m": d_m,
            "M_upper": w * w / 8,
            "lambda_c_upper_e24": lam_c_e24,
            "lambda_c_upper_e25": lam_c_e25,
            "lambda_upper_e20": lambda_upper_e20(w, lam_c_e24),
            "lambda_upper_e26": lambda_upper_e26(w, lam_c_e24, m),
            "e15_via_e25": pi * pi / 8 * (1 + 7 * K),
            "e26_margin": e26_simplification_margin(m),
        },
    )


# -- published auxiliary bounds --------------------------------------------------------


def _as_iv(x) -> Interval:
    if isinstance(x, Interval):
        return x
    if isinstance(x, str):
        return Interval.from_decimal(x)
    return Interval.coerce(x)


def auxiliary_published_bounds(which: str, **params) -> BoundResult:
    """Evaluate one of e4_cm, e9_slab, e11_slab, e12_planar, e33_lambda_upper."""
    pi = _pi()
    if which == "e4_cm":
        m = int(params["m"])
        if m < 1:
            raise DomainNotSupported("m must be positive")
        from polya.interval import ln2_enclosure

        value = (m + sqrt(5 * (4 + ln2_enclosure())) * sqrt(Interval(float(m))) + 8) / 8
        return BoundResult(value, Kind.UPPER, Quantity.LAMBDA_M, "e4", True, params={"m": m})
    if which == "e9_slab":
        return BoundResult(pi * pi / 8, Kind.LOWER, Quantity.LAMBDA_M, "e9", True)
    if which == "e11_slab":
        m = int(params.get("m", 2))
        n = params["n"]
        n_iv = _as_iv(n)
        if n_iv.lo < 1.0:
            raise DomainNotSupported("e11 requires n >= 1")
        value = pi * pi / 8 + (m - 1) / (8 * (n_iv - Interval.from_fraction(Fraction(2, 3))))
        return BoundResult(value, Kind.UPPER, Quantity.LAMBDA_M, "e11", True, params={"m": m, "n": n_iv})
    if which == "e12_planar":
        w, diam = _as_iv(params["w"]), _as_iv(params["diam"])
        if w.lo <= 0.0 or w.hi > diam.lo:
            raise DomainNotSupported("e12 requires 0 < w <= diam")
        value = pi * pi / 8 * (1 + 7 * rational_pow(Interval(9.0), 1, 3) * rational_pow(w / diam, 2, 3))
        return BoundResult(value, Kind.UPPER, Quantity.LAMBDA_M, "e12", True, params={"w": w, "diam": diam})
    if which == "e33_lambda_upper":
        d = _as_iv(params["d"])
        if d.lo <= 0.0:
            raise DomainNotSupported("e33 requires d > 0")
        value = pi * pi / (d * d) * (1 + 7 * rational_pow(d / 2, 2, 3))
        return BoundResult(value, Kind.UPPER, Quantity.LAMBDA, "e33", True, params={"d": d})
    raise ValueError(f"unknown published bound {which!r}")


# -- sandwich selection ---------------------------------------------------------------


def certified_sandwich(shape) -> tuple[Optional[BoundResult], Optional[BoundResult]]:
    """Best valid (lower, upper) Polya-ratio bounds for a triangle or rhombus.

    Either side is None when no bound applies to the shape.  Among several
    valid lower bounds the one with the largest lower endpoint is returned.
    """
    lowers: list[BoundResult] = []
    uppers: list[BoundResult] = []
    if isinstance(shape, IsoscelesTriangle):
        candidates = [
            lambda: triangle_ratio_upper(shape),
            lambda: triangle_ratio_lower_wide(shape),
            lambda: triangle_ratio_lower_G(shape),
            lambda: triangle_ratio_lower_narrow(shape.alpha),
        ]
    elif isinstance(shape, Rhombus):
        candidates = [lambda: rhombus_ratio_upper(shape), lambda: rhombus_ratio_lower(shape)]
    else:
        raise DomainNotSupported(f"no Polya-ratio bounds for {type(shape).__name__}")
    for make in candidates:
        try:
            b = make()
        except DomainNotSupported:
            continue
        if b.valid:
            (lowers if b.kind is Kind.LOWER else uppers).append(b)
    lower = max(lowers, key=lambda b: b.value.lo, default=None)
    upper = min(uppers, key=lambda b: b.value.hi, default=None)
    return lower, upper
