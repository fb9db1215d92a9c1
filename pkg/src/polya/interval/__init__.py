"""Rigorous interval arithmetic: the value carrier for every certified quantity."""

from polya.interval.constants import (
    ConstantTable,
    bessel_j0_enclosure,
    bessel_zero_enclosure,
    constants,
    constants_json,
    zeta5_enclosure,
)
from polya.interval.core import (
    Interval,
    arith,
    hull,
    midrad,
    pow_int,
    rational_pow,
    root_and_rational_pow,
    sqrt,
)
from polya.interval.elementary import (
    atan,
    cos,
    half_pi_enclosure,
    ln2_enclosure,
    pi_enclosure,
    sin,
    tan,
    trig,
)

__all__ = [
    "ConstantTable",
    "Interval",
    "arith",
    "atan",
    "bessel_j0_enclosure",
    "bessel_zero_enclosure",
    "constants",
    "constants_json",
    "cos",
    "half_pi_enclosure",
    "hull",
    "ln2_enclosure",
    "midrad",
    "pi_enclosure",
    "pow_int",
    "rational_pow",
    "root_and_rational_pow",
    "sin",
    "sqrt",
    "tan",
    "trig",
    "zeta5_enclosure",
]
