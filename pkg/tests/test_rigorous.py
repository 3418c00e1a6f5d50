from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from pomverify.rigorous import RigorousReal, euler_gamma, pi


def encloses(r, exact_mpf):
    return r.lower <= exact_mpf <= r.upper


def test_decimal_literal_is_enclosed_not_rounded():
    r = RigorousReal("0.1", 64)
    assert r.lower < r.upper
    assert r.contains(Fraction(1, 10))


def test_constants_enclose_high_precision_values():
    with mpmath.workdps(120):
        assert encloses(pi(256), +mpmath.pi)
        assert encloses(euler_gamma(256), +mpmath.euler)


def test_division_by_interval_containing_zero():
    with pytest.raises(ZeroDivisionError):
        RigorousReal(1) / RigorousReal((-1, 1))


def test_log_needs_positive_argument():
    with pytest.raises(ValueError):
        RigorousReal((-1, 2)).log()


def test_directed_decimal_output():
    r = RigorousReal(Fraction(1, 3), 128)
    assert r.lower_str(10) == "0.3333333333"
    assert r.upper_str(10) == "0.3333333334"


def test_sign_is_zero_when_undecided():
    assert RigorousReal((-1, 1)).sign() == 0
    assert RigorousReal(2).sign() == 1


rationals = st.fractions(min_value=Fraction(1, 10**6), max_value=10**6, max_denominator=10**6)


@settings(max_examples=60, deadline=None)
@given(rationals, rationals)
def test_arithmetic_encloses_exact_rationals(a, b):
    ra, rb = RigorousReal(a, 64), RigorousReal(b, 64)
    for r, exact in ((ra + rb, a + b), (ra - rb, a - b), (ra * rb, a * b), (ra / rb, a / b)):
        assert r.contains(exact)


@settings(max_examples=40, deadline=None)
@given(rationals)
def test_transcendentals_enclose_mpmath(a):
    r = RigorousReal(a, 96)
    with mpmath.workdps(80):
        x = mpmath.mpf(a.numerator) / a.denominator
        assert encloses(r.log(), mpmath.log(x))
        assert encloses(r.sqrt(), mpmath.sqrt(x))
        if a < 1000:
            assert encloses(r.exp(), mpmath.exp(x))


@settings(max_examples=30, deadline=None)
@given(rationals, st.integers(8, 200))
def test_more_bits_never_widen(a, bits):
    lo = RigorousReal(a, bits).log()
    hi = RigorousReal(a, bits + 64).log()
    assert hi.width <= lo.width
