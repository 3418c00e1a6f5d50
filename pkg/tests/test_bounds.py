
import mpmath
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from pomverify import bounds as B
from pomverify.errors import DomainError, ProfileError


def encloses(r, v):
    return r.lower <= v <= r.upper


@pytest.mark.parametrize("x", [2, 3, 10, 1000, 355991, 10**9, 10**15, 10**50])
def test_li_encloses_mpmath(x):
    with mpmath.workdps(60):
        assert encloses(B.li(x, 160), mpmath.li(x))


def test_li_against_quadrature():
    with mpmath.workdps(40):
        ref = mpmath.li(2) + mpmath.quad(lambda t: 1 / mpmath.log(t), [2, 10, 100, 1000])
        r = B.li(1000, 128)
        assert abs(r.mid - ref) < mpmath.mpf(10) ** -30


def test_li_enclosure_is_tight():
    r = B.li(10**9, 128)
    assert r.width < mpmath.mpf(2) ** -90


def test_li_domain():
    with pytest.raises(DomainError):
        B.li(1)


def test_dusart_applicability():
    lo, hi = B.pi_bounds_dusart(88783)
    assert lo is None and hi is None
    # pi(88788) = 8596 while the formula exceeds 8596.47 there
    assert B.pi_bounds_dusart(88788)[0] is None
    assert B.pi_bounds_dusart(88789)[0] is not None
    lo, hi = B.pi_bounds_dusart(100000)
    assert lo is not None and hi is None
    lo, hi = B.pi_bounds_dusart(355992)
    assert lo is not None and hi is not None


@pytest.mark.parametrize("x", [88789, 100000, 355992, 10**6, 10**7 + 19])
def test_dusart_brackets_pi(x):
    px = int(sympy.primepi(x))
    lo, hi = B.pi_bounds_dusart(x)
    assert lo.upper < px
    if hi is not None:
        assert px < hi.lower


def test_gap_profiles():
    x = 10**8
    rh = B.pi_li_gap(x, B.RH)
    with mpmath.workdps(50):
        assert encloses(rh, mpmath.sqrt(x) * mpmath.log(x) / (8 * mpmath.pi))
    with pytest.raises(DomainError):
        B.pi_li_gap(2656, B.RH)
    with pytest.raises(DomainError):
        B.pi_li_gap(57, B.UNCONDITIONAL)
    # smaller R gives a smaller error term
    assert B.pi_li_gap(10**30, B.KADIRI_EXPERIMENTAL).upper < B.pi_li_gap(10**30).lower


def test_profile_lookup():
    assert B.profile_by_name("kadiri") is B.KADIRI_EXPERIMENTAL
    assert B.profile_by_name("RH") is B.RH
    assert not B.KADIRI_EXPERIMENTAL.certifying
    with pytest.raises(ValueError):
        B.profile_by_name("nope")


def test_nth_prime_bounds():
    for n in (6, 100, 10**5):
        p = sympy.prime(n)
        lo, hi = B.nth_prime_bounds(n)
        assert lo.upper < p < hi.lower


def test_h_function_bounds_totient_ratio():
    for n in (30, 210, 2310, 30030, 510510, 9699690):
        assert n / sympy.totient(n) < B.h_function(n).lower


def test_step1_threshold():
    with pytest.raises(DomainError):
        B.step1_gap_lower(712000)
    x = 10**6
    assert B.step1_gap_lower(x).upper < 2 * sympy.primepi(x // 2) - sympy.primepi(x)


def test_rh_gap_needs_rh():
    with pytest.raises(ProfileError):
        B.rh_gap_lower(10**6, 10**5, B.UNCONDITIONAL)


def test_theta_switch():
    assert B.rh_theta_multiplier(10**14) == 4
    assert B.rh_theta_multiplier(10**14 + 1) == 2
    a = B.rh_gap_lower(10**14 - 2 * 10**6, 10**6)
    b = B.rh_gap_lower(10**14 - 2 * 10**6, 10**6, theta_multiplier=2)
    assert b.upper < a.lower


@settings(max_examples=40, deadline=None)
@given(st.integers(3000, 10**6), st.integers(1, 500))
def test_rh_gap_lower_below_true_value(y, m):
    x = y * m + 2657
    true = 2 * sympy.primepi(x + y) - sympy.primepi(x) - sympy.primepi(x + 2 * y)
    assert B.rh_gap_lower(x, y).lower < true


def test_bounds_table_columns_and_order():
    rows = B.bounds_table([400000, 10**6])
    assert tuple(rows[0]) == B.BOUNDS_COLUMNS
    assert rows[1]["pi_exact"] == 78498
    assert B.bounds_table([50])[0]["gap_bound"] == ""
