"""Exception hierarchy shared by every module."""


class PolyaError(Exception):
    """Base class for all library errors."""


class IntervalError(PolyaError, ArithmeticError):
    pass


class DivisionByZeroInterval(IntervalError, ZeroDivisionError):
    pass


class OverflowToNonFinite(IntervalError, OverflowError):
    pass


class NonFiniteInput(IntervalError, ValueError):
    pass


class NegativeBase(IntervalError, ValueError):
    pass


class DomainNotSupported(PolyaError, ValueError):
    """Argument outside the range a rigorous kernel or theorem supports."""


class UnsupportedOrder(DomainNotSupported):
    """Bessel order (or ambient dimension) without a certified zero enclosure."""


class NonConvergence(PolyaError, RuntimeError):
    pass


class ShapeSpecError(PolyaError, ValueError):
    """Unparseable textual shape description."""
