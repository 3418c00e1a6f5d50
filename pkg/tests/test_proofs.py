import mpmath
import pytest

from pomverify import proofs as P
from pomverify.bounds import KADIRI_EXPERIMENTAL, RH, gen_gap_lower, rh_gap_lower
from pomverify.errors import DomainError, UncertifiableAtPrecision
from pomverify.rigorous import RigorousReal


def mp_f0(k):
    with mpmath.workdps(60):
        k = mpmath.mpf(k)
        a, b = mpmath.log(k / 2), mpmath.log(k)
        return (k / a + k / a**2 + 2 * k / a**3 - k / b - k / b**2 - mpmath.mpf("2.51") * k / b**3 - b)


@pytest.mark.parametrize("k", [10**6, 10**11, 3 * 10**13, 10**40])
def test_f0_against_float_oracle(k):
    r = P.f0(k, 200)
    with mpmath.workdps(60):
        assert r.lower <= mp_f0(k) <= r.upper


@pytest.mark.parametrize("n,k", [(1, 10**6), (5, 10**20), (300, 10**200), (1500, 10**3500)])
def test_f_n_coheres_with_gen_gap_lower(n, k):
    a = P.f_n(n, k, precision=256)
    b = gen_gap_lower(n * k, RigorousReal(k, 256) / 2, precision=256)
    assert a.overlaps(b)


@pytest.mark.parametrize("L,k", [(5, 10**11), (29, 10**11), (34, 8 * 10**12)])
def test_regrouping_identity(L, k):
    total = P.F_n(1, k, L)
    for n in range(2, L + 1):
        total = total + P.F_n(n, k, L)
    block = P.f0(k)
    for n in range(1, L + 1):
        block = block + rh_gap_lower(n * k, RigorousReal(k, 256) / 2, RH, 256,
                                     theta_multiplier=P.theta_multiplier(n, k))
    assert total.overlaps(block)


def test_F_n_at_generic_corner():
    v = P.F_n(28, 10**11, 28)
    assert v.width < 1e-40 * abs(v.mid)


def test_F_n_domain():
    with pytest.raises(DomainError):
        P.F_n(0, 10**11, 5)
    with pytest.raises(DomainError):
        P.F_n(6, 10**11, 5)


def test_theta_selection():
    assert P.theta_multiplier(1, 5 * 10**13) == 4
    assert P.theta_multiplier(2, 5 * 10**13 // 1 - 1) == 2
    assert P.theta_multiplier(33, 10**14 // 34) == 4
    assert P.theta_multiplier(33, 10**14 // 34 + 1) == 2
    # 2 pi gives the weaker (more negative) bound
    assert P.rh_gap_term(33, 3 * 10**12, 2).upper < P.rh_gap_term(33, 3 * 10**12, 4).lower


@pytest.mark.parametrize("L,expected", [(29, 10**11), (30, 2 * 10**11), (31, 6 * 10**11),
                                        (32, 10**12), (33, 3 * 10**12), (34, 8 * 10**12)])
def test_k_L_closed_form(L, expected):
    assert P.k_L(L) == expected


def test_pair_table_literals():
    assert tuple(P.pair_table()) == P.TABLE_PAIRS


def test_grid_includes_both_sides_of_switch():
    g = P._grid(10**12, 3 * 10**13, 8, 34)
    b = 10**14 // 35
    assert b in g and b + 1 in g
    assert g[0] == 10**12 and g[-1] == 3 * 10**13


def test_thm11_certifies():
    r = P.verify_theorem_1_1()
    assert r.overall and r.certifying
    assert {c.name for c in r.conditions} == {"partial-sums", "monotone-decreasing", "tail-real",
                                             "tail-ceiling"}


def test_thm11_low_precision_is_uncertifiable():
    with pytest.raises(UncertifiableAtPrecision) as e:
        P.verify_theorem_1_1(precision=8)
    assert e.value.report is not None


def test_kadiri_is_flagged_non_certifying():
    r = P.verify_theorem_1_1(profile=KADIRI_EXPERIMENTAL)
    assert not r.certifying
    assert r.flags[0].startswith("NON-CERTIFYING")
    assert r.target == "10^1000"


def test_pair_in_isolation():
    r = P.verify_pair(29, 10**11)
    assert r.conditions[0].name.endswith("sum-at-start") and r.conditions[0].certified
    assert r.overall


@pytest.fixture(scope="module")
def thm12_reports():
    return {p: P.verify_theorem_1_2(p) for p in (128, 256)}


def test_thm12_certifies(thm12_reports):
    r = thm12_reports[256]
    assert r.overall
    names = [c.name for c in r.conditions]
    assert sum(n.startswith("pair(") and n.endswith("sum-at-start") for n in names) == 6
    assert sum(n.startswith("generic(") and n.endswith("sum-at-start") for n in names) == 28


def test_precision_monotonicity(thm12_reports):
    low, high = thm12_reports[128], thm12_reports[256]
    ok_low = {c.name for c in low.conditions if c.certified}
    ok_high = {c.name for c in high.conditions if c.certified}
    assert ok_low <= ok_high
    a = P.verify_theorem_1_1(precision=192)
    b = P.verify_theorem_1_1(precision=320)
    assert {c.name for c in a.conditions if c.certified} <= {c.name for c in b.conditions if c.certified}
