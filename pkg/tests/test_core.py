import math

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from conftest import brute_is_p_integer
from pomverify import KNOWN_P_INTEGERS
from pomverify.core import (
    Half,
    classify_residues,
    coprime_prime_prefix,
    criterion_holds,
    criterion_report,
    is_p_integer,
    l_bounds,
    s_L_sum,
)
from pomverify.errors import DomainError


def test_matches_brute_force_small():
    for k in range(2, 400):
        assert is_p_integer(k).is_p == brute_is_p_integer(k), k


def test_known_set_below_2000():
    assert [k for k in range(2, 2000) if is_p_integer(k).is_p] == list(KNOWN_P_INTEGERS)


@settings(max_examples=25, deadline=None)
@given(st.integers(400, 3000))
def test_collision_certificate_is_genuine(k):
    v = is_p_integer(k)
    assert not v.is_p
    p, q = v.collision
    assert p < q and sympy.isprime(p) and sympy.isprime(q)
    assert p % k == q % k and math.gcd(p, k) == 1 and math.gcd(q, k) == 1
    # both lie among the first phi(k) primes coprime to k
    coprime_rank = sum(1 for r in sympy.primerange(2, q + 1) if k % r)
    assert coprime_rank <= sympy.totient(k)


def test_collision_for_8():
    v = is_p_integer(8)
    assert v.collision == (3, 11)


def test_domain():
    with pytest.raises(DomainError):
        is_p_integer(1)


def test_prefix_marks_divisors():
    pre = coprime_prime_prefix(30)
    assert len(pre) == 8 + 3
    assert [p for p, d in pre if d] == [2, 3, 5]


def test_classification_of_30():
    c = classify_residues(30)
    assert (c.d1, c.d2, c.d3, c.t, c.L, c.case) == (7, 4, 3, 1, 0, Half.LOW_HALF)
    assert c.identity_holds


def test_identity_against_direct_half_counts():
    for k in range(31, 800):
        c = classify_residues(k)
        ps = list(sympy.primerange(2, c.p_T + 1))
        assert len(ps) == c.T
        assert c.d1 == sum(1 for p in ps if 2 * (p % k) < k)
        assert c.identity_holds, k


def test_boundary_correction_only_for_boundary_primes():
    assert classify_residues(1009).boundary_correction != 0  # prime k is its own residue 0
    assert classify_residues(2 * 3 * 5 * 7).boundary_correction == 0


def test_s_L_against_direct_sum():
    k, L = 1000, 3
    direct = sum(2 * sympy.primepi(n * k + k // 2) - sympy.primepi(n * k) - sympy.primepi(n * k + k)
                 for n in range(L + 1))
    assert s_L_sum(k, L) == direct


def test_criterion_values():
    r = criterion_report(30)
    assert r.s_L == 2 and r.criterion is False
    assert criterion_report(12).s_L == 1
    assert criterion_holds(10**6) is True
    assert criterion_report(10**6).s_L == 6665
    d = r.to_dict()
    assert (d["d1"], d["d2"], d["d3"]) == (7, 4, 3)


def test_criterion_false_on_known_set():
    for k in KNOWN_P_INTEGERS:
        assert criterion_holds(k) is False


def test_criterion_indeterminate_beyond_ceiling():
    from pomverify.primes import PrimeEngine, SieveConfig

    eng = PrimeEngine(SieveConfig(x_max=5 * 10**6))
    assert criterion_report(10**7, engine=eng).criterion == "indeterminate"


def test_l_bounds_bracket_actual_L():
    for k in (1000, 10**5, 10**6 + 2):
        c = classify_residues(k)
        upper, lower = l_bounds(k)
        assert lower.upper < c.L + 1e-9 and c.L <= upper.lower


def test_l_bounds_large():
    upper, _ = l_bounds(3 * 10**13)
    assert 34 < upper.lower and upper.upper < 35
