"""Directed-rounding real enclosures on top of :mod:`mpmath`'s interval context.

Every operation on a :class:`RigorousReal` returns an interval that contains
the exact result.  Sign questions are answered only when the whole
enclosure lies on one side of zero; otherwise the answer is "undecided".
"""

from __future__ import annotations

import decimal
from contextlib import contextmanager
from fractions import Fraction
from numbers import Integral

from mpmath import iv, mp, mpf

DEFAULT_PRECISION = 128
PROOF_PRECISION = 256

# Euler-Mascheroni constant, 90 digits; the enclosure below is +-1e-88.
_EULER_DIGITS = (
    "0.577215664901532860606512090082402431042159335939923598805767234884867726777664670936947063"
)


@contextmanager
def working_precision(bits):
    """Temporarily set the interval context to ``bits`` of precision."""
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def _to_iv(value):
    if isinstance(value, RigorousReal):
        return value._v
    if isinstance(value, bool):
        raise TypeError("booleans are not reals")
    if isinstance(value, Integral):
        return iv.mpf(int(value))
    if isinstance(value, Fraction):
        return iv.mpf(value.numerator) / iv.mpf(value.denominator)
    if isinstance(value, str):
        if "/" in value:
            return _to_iv(Fraction(value))
        return iv.mpf(value)
    if isinstance(value, float):
        return iv.mpf(value)
    if isinstance(value, tuple) and len(value) == 2:
        lo, hi = (_to_iv(v) for v in value)
        return iv.mpf([mp.make_mpf(lo._mpi_[0]), mp.make_mpf(hi._mpi_[1])])
    if type(value).__name__ == "ivmpf":
        return value
    if isinstance(value, mpf):
        return iv.mpf(value)
    raise TypeError(f"cannot build an enclosure from {type(value).__name__}")


def _directed_decimal(m, digits, floor):
    """Decimal string for mpf ``m`` rounded toward -inf (floor) or +inf."""
    if not mp.isfinite(m):
        return str(m)
    sign, man, exp, _ = m._mpf_
    if man == 0:
        return "0"
    ctx = decimal.Context(prec=digits, rounding=decimal.ROUND_FLOOR if floor else decimal.ROUND_CEILING,
                          Emax=decimal.MAX_EMAX, Emin=decimal.MIN_EMIN)
    num = -int(man) if sign else int(man)
    if exp >= 0:
        d = ctx.plus(decimal.Decimal(num * (1 << exp)))
    else:
        d = ctx.divide(decimal.Decimal(num), decimal.Decimal(1 << -exp))
    return format(d, "g") if abs(d.adjusted()) < 30 else format(d, "E")


class RigorousReal:
    """Closed interval ``[lower, upper]`` carried at a fixed binary precision."""

    __slots__ = ("_v", "precision")

    def __init__(self, value, precision=DEFAULT_PRECISION):
        if precision < 2:
            raise ValueError("precision must be at least 2 bits")
        self.precision = int(precision)
        with working_precision(self.precision):
            self._v = _to_iv(value)
        if mp.make_mpf(self._v._mpi_[0]) > mp.make_mpf(self._v._mpi_[1]):
            raise ValueError("lower endpoint exceeds upper endpoint")

    @classmethod
    def _wrap(cls, v, precision):
        obj = cls.__new__(cls)
        obj._v = v
        obj.precision = precision
        return obj

    # endpoints

    @property
    def lower(self):
        return mp.make_mpf(self._v._mpi_[0])

    @property
    def upper(self):
        return mp.make_mpf(self._v._mpi_[1])

    @property
    def mid(self):
        return (self.lower + self.upper) / 2

    @property
    def width(self):
        with mp.workprec(self.precision + 10):
            return self.upper - self.lower

    def __repr__(self):
        return f"RigorousReal([{self.lower_str()}, {self.upper_str()}], prec={self.precision})"

    def lower_str(self, digits=25):
        return _directed_decimal(self.lower, digits, floor=True)

    def upper_str(self, digits=25):
        return _directed_decimal(self.upper, digits, floor=False)

    def to_dict(self, digits=25):
        return {"lower": self.lower_str(digits), "upper": self.upper_str(digits)}

    # arithmetic

    def _binary(self, other, op):
        if isinstance(other, RigorousReal):
            prec = max(self.precision, other.precision)
        else:
            prec = self.precision
        with working_precision(prec):
            return RigorousReal._wrap(op(self._v, _to_iv(other)), prec)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __radd__(self, other):
        return self._binary(other, lambda a, b: b + a)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    def __rmul__(self, other):
        return self._binary(other, lambda a, b: b * a)

    def __truediv__(self, other):
        if isinstance(other, RigorousReal) and other.contains(0):
            raise ZeroDivisionError("divisor enclosure contains zero")
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        if self.contains(0):
            raise ZeroDivisionError("divisor enclosure contains zero")
        return self._binary(other, lambda a, b: b / a)

    def __neg__(self):
        return RigorousReal._wrap(-self._v, self.precision)

    def __pow__(self, exponent):
        if isinstance(exponent, Integral) and not isinstance(exponent, bool):
            with working_precision(self.precision):
                return RigorousReal._wrap(self._v ** int(exponent), self.precision)
        if not self.is_positive():
            raise ValueError("real powers need a positive base")
        return (self.log() * exponent).exp()

    # elementary functions

    def log(self):
        if not self.is_positive():
            raise ValueError("log of an enclosure that is not certainly positive")
        with working_precision(self.precision):
            return RigorousReal._wrap(iv.log(self._v), self.precision)

    def exp(self):
        with working_precision(self.precision):
            return RigorousReal._wrap(iv.exp(self._v), self.precision)

    def sqrt(self):
        if self.lower < 0:
            raise ValueError("sqrt of an enclosure with negative part")
        with working_precision(self.precision):
            return RigorousReal._wrap(iv.sqrt(self._v), self.precision)

    def hull(self, other):
        """Smallest enclosure containing both operands."""
        other = other if isinstance(other, RigorousReal) else RigorousReal(other, self.precision)
        lo = min(self.lower, other.lower)
        hi = max(self.upper, other.upper)
        prec = max(self.precision, other.precision)
        with working_precision(prec):
            return RigorousReal._wrap(iv.mpf([lo, hi]), prec)

    # certified predicates

    def contains(self, x):
        with working_precision(self.precision):
            xv = _to_iv(x)
        return self.lower <= mp.make_mpf(xv._mpi_[0]) and mp.make_mpf(xv._mpi_[1]) <= self.upper

    def overlaps(self, other):
        return not (self.upper < other.lower or other.upper < self.lower)

    def is_positive(self):
        return self.lower > 0

    def is_negative(self):
        return self.upper < 0

    def sign(self):
        """+1 or -1 when the sign is certain, 0 when the enclosure straddles zero."""
        if self.lower > 0:
            return 1
        if self.upper < 0:
            return -1
        return 0

    def certainly_gt(self, other):
        other = other if isinstance(other, RigorousReal) else RigorousReal(other, self.precision)
        return self.lower > other.upper

    def certainly_lt(self, other):
        other = other if isinstance(other, RigorousReal) else RigorousReal(other, self.precision)
        return self.upper < other.lower


def as_real(value, precision=DEFAULT_PRECISION):
    """Coerce ``value`` to a :class:`RigorousReal` (no-op for enclosures)."""
    if isinstance(value, RigorousReal):
        return value
    return RigorousReal(value, precision)


def log(x, precision=DEFAULT_PRECISION):
    return as_real(x, precision).log()


def exp(x, precision=DEFAULT_PRECISION):
    return as_real(x, precision).exp()


def sqrt(x, precision=DEFAULT_PRECISION):
    return as_real(x, precision).sqrt()


def pi(precision=DEFAULT_PRECISION):
    with working_precision(precision):
        return RigorousReal._wrap(+iv.pi, precision)


def euler_gamma(precision=DEFAULT_PRECISION):
    """Stored enclosure of the Euler-Mascheroni constant (good to about 290 bits)."""
    return RigorousReal(_EULER_DIGITS, precision) + RigorousReal(("-1e-88", "1e-88"), precision)
