"""Interval certificates for the analytic inequalities that bound P-integers.

Two families of checks are reproduced:

* the unconditional bound: with f_0 and f_n built from the Dusart and
  de la Vallee Poussin type error terms, every partial sum
  f_0 + f_1 + ... + f_L (L <= 1500) is positive at k = 10**3500, f_n
  decreases in n, and the tail inequality at n = log(k log k) holds;
* the bound under RH: the sums of F_n(k) are positive at the start of every
  relevant k-range and each F_n increases along a grid, together with the
  large-k inequality pi sqrt(k) > 2 (n+1)^1.5 log^3(nk+k).

A condition is certified only when its whole enclosure lies on the right
side of zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .bounds import KADIRI_EXPERIMENTAL, RH, THETA_SWITCH, UNCONDITIONAL, const
from .errors import DomainError, UncertifiableAtPrecision
from .rigorous import PROOF_PRECISION, RigorousReal, pi

TABLE_PAIRS = ((29, 10**11), (30, 2 * 10**11), (31, 6 * 10**11), (32, 10**12), (33, 3 * 10**12),
               (34, 8 * 10**12))
THM11_EXPONENT = 3500
KADIRI_EXPONENT = 1000
SPLIT = 1500
RH_LARGE_K = 3 * 10**13
RH_SMALL_K = 10**11
GRID_POINTS = 64
NON_CERTIFYING_BANNER = ("NON-CERTIFYING: the zero-free-region constant R = 5.69693 is not known "
                         "to be admissible in the error term; this report is exploratory only")
SCHEMA = "pomverify.proof/1"


class Status(str, enum.Enum):
    CERTIFIED = "CERTIFIED"
    FAILED = "FAILED"
    UNDECIDED = "UNDECIDED"


@dataclass
class Condition:
    name: str
    description: str
    enclosure: RigorousReal | None
    status: Status
    literal_only: bool = False
    details: dict = field(default_factory=dict)

    @property
    def certified(self):
        return self.status is Status.CERTIFIED

    def to_dict(self):
        d = {"name": self.name, "description": self.description, "status": self.status.value,
             "certified": self.certified}
        if self.enclosure is not None:
            d["enclosure"] = self.enclosure.to_dict()
        if self.literal_only:
            d["literal_4pi_only"] = True
        if self.details:
            d["details"] = self.details
        return d


def positivity(name, description, value, **details):
    """Condition 'value > 0' graded by the sign of its enclosure."""
    s = value.sign()
    status = Status.CERTIFIED if s > 0 else Status.FAILED if s < 0 else Status.UNDECIDED
    return Condition(name, description, value, status, details=details)


@dataclass
class ProofReport:
    theorem: str
    conditions: list
    precision: int
    profile: str
    certifying: bool = True
    flags: list = field(default_factory=list)
    target: str | None = None

    @property
    def overall(self):
        return bool(self.conditions) and all(c.certified for c in self.conditions)

    @property
    def undecided(self):
        return [c for c in self.conditions if c.status is Status.UNDECIDED]

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "theorem": self.theorem,
            "target": self.target,
            "profile": self.profile,
            "precision": self.precision,
            "certifying": self.certifying,
            "overall": self.overall,
            "flags": list(self.flags),
            "conditions": [c.to_dict() for c in self.conditions],
        }


def _finish(report):
    """Raise when the outcome hinges on undecided signs, otherwise return."""
    if report.undecided and not any(c.status is Status.FAILED for c in report.conditions):
        names = ", ".join(c.name for c in report.undecided[:3])
        raise UncertifiableAtPrecision(
            f"enclosures too wide at {report.precision} bits ({names}); retry with more bits", report)
    return report


# summands


def _k(k, precision):
    return k if isinstance(k, RigorousReal) else RigorousReal(k, precision)


def f0(k, precision=PROOF_PRECISION):
    """Dusart difference 2 pi(k/2) - pi(k) lower bound minus log k."""
    k = _k(k, precision)
    if not k.lower > 2:
        raise DomainError("f0 needs k > 2")
    precision = k.precision
    a = (k / 2).log()
    b = k.log()
    return (k / a + k / a**2 + 2 * k / a**3
            - k / b - k / b**2 - const("2.51", precision) * k / b**3 - b)


def f_n(n, k, profile=UNCONDITIONAL, precision=PROOF_PRECISION):
    """k / (4(n+1) log^2(nk+k)) - 1.7576 (nk+k) (log nk)^(-3/4) exp(-sqrt(log(nk)/R))."""
    k = _k(k, precision)
    precision = k.precision
    n = n if isinstance(n, RigorousReal) else RigorousReal(n, precision)
    if not (n.lower >= 1 and k.lower >= 59):
        raise DomainError("f_n needs n >= 1 and k >= 59")
    nk = n * k
    s = nk + k
    lnk = nk.log()
    main = k / (4 * (n + 1) * s.log() ** 2)
    R = const(profile.R, precision)
    err = const("1.7576", precision) * s * lnk ** Fraction(-3, 4) * (-(lnk / R).sqrt()).exp()
    return main - err


def theta_multiplier(n, k):
    """4 when (n+1) k <= 10**14 (exact for integer k), else 2."""
    if isinstance(k, int):
        return 4 if (n + 1) * k <= THETA_SWITCH else 2
    s = (n + 1) * k
    return 4 if s.upper <= THETA_SWITCH else 2


def rh_gap_term(n, k, theta=None, precision=PROOF_PRECISION):
    """k / (4(n+1) log^2(nk+k)) - log(nk+k) sqrt(nk+k) / theta, theta = 2 pi or 4 pi."""
    mult = theta if theta is not None else theta_multiplier(n, k)
    K = _k(k, precision)
    s = (n + 1) * K
    ls = s.log()
    return K / (4 * (n + 1) * ls**2) - ls * s.sqrt() / (mult * pi(K.precision))


def F_n(n, k, L, precision=PROOF_PRECISION, theta=None):
    """f0(k) / L + rh_gap_term(n, k); ``theta`` = 4 reproduces the literal 4 pi reading."""
    if not (1 <= n <= L):
        raise DomainError("F_n needs 1 <= n <= L")
    K = _k(k, precision)
    if not K.lower >= 2657:
        raise DomainError("F_n needs k >= 2657")
    return f0(K) / L + rh_gap_term(n, k, theta, precision)


# pair table


def k_L(L):
    """floor(10^{frac(.38 L)}) * 10^{floor(.38 L)} in exact integer arithmetic."""
    whole, frac100 = divmod(38 * L, 100)
    # floor(10^{r/100}) is the largest d with d^100 <= 10^r
    d = max(d for d in range(1, 10) if d**100 <= 10**frac100)
    return d * 10**whole


@dataclass(frozen=True)
class PairTable:
    entries: tuple

    def __iter__(self):
        return iter(self.entries)


def pair_table():
    entries = tuple((L, k_L(L)) for L in range(29, 35))
    if entries != TABLE_PAIRS:
        raise AssertionError(f"k_L formula gives {entries}, expected {TABLE_PAIRS}")
    return PairTable(entries)


# unconditional bound


def verify_theorem_1_1(precision=PROOF_PRECISION, profile=UNCONDITIONAL, exponent=None,
                       split=SPLIT, monotone_upto=3000):
    """Certify the three numerical steps of the unconditional bound at k = 10**exponent."""
    if exponent is None:
        exponent = KADIRI_EXPONENT if profile is KADIRI_EXPERIMENTAL else THM11_EXPONENT
    theorem = "T11_KADIRI" if profile is KADIRI_EXPERIMENTAL else "T11"
    report = ProofReport(theorem, [], precision, profile.slug, profile.certifying,
                         target=f"10^{exponent}")
    if not profile.certifying:
        report.flags.append(NON_CERTIFYING_BANNER)
    K = RigorousReal(10**exponent, precision)
    n_star = (K * K.log()).log()
    n_ceil = math.ceil(n_star.upper)
    # (a) partial sums
    total = f0(K)
    values = {}
    worst, worst_L = total, 0
    for n in range(1, max(n_ceil, monotone_upto) + 2):
        values[n] = f_n(n, K, profile)
    for n in range(1, split + 1):
        total = total + values[n]
        if total.lower < worst.lower:
            worst, worst_L = total, n
    report.conditions.append(positivity(
        "partial-sums", f"f0 + f_1 + ... + f_L > 0 for every 0 <= L <= {split}", worst,
        argmin_L=worst_L, full_sum=total.to_dict()))
    # (b) monotone decrease in n
    top = max(n_ceil, monotone_upto)
    diffs = [(values[n] - values[n + 1], n) for n in range(1, top + 1)]
    dmin, at = min(diffs, key=lambda d: d[0].lower)
    report.conditions.append(positivity(
        "monotone-decreasing", f"f_n - f_(n+1) > 0 for n = 1..{top}", dmin, worst_n=at))
    # (c) tail condition
    for label, n, L in (("real", n_star, n_star), ("ceiling", n_ceil, n_ceil)):
        fn = f_n(n, K, profile) if label == "real" else values[n_ceil]
        tail = fn + total / (L - split)
        report.conditions.append(positivity(
            f"tail-{label}", f"f_n + (f0 + f_1 + ... + f_{split}) / (L - {split}) > 0 at "
            f"n = L = {'log(k log k)' if label == 'real' else 'ceil(log(k log k))'}",
            tail, n=n_star.to_dict() if label == "real" else n_ceil))
    upper, lower = _l_window(K, precision)
    report.flags.append(f"L(k) range at k: ({lower.lower_str(8)}, {upper.upper_str(8)})")
    return _finish(report)


def _l_window(K, precision):
    """(upper, lower) enclosures for L(k), as in :func:`pomverify.core.l_bounds`."""
    lk = K.log()
    h = const("1.7811", precision) * lk.log() + const("2.51", precision) / lk.log()
    return (K * lk).log(), (lk - h.log()) / h - 2


# bound under RH


class _FCache:
    """Memoised f0(k) and RH gap terms at integer k."""

    def __init__(self, precision):
        self.precision = precision
        self._f0 = {}
        self._g = {}

    def f0(self, k):
        if k not in self._f0:
            self._f0[k] = f0(RigorousReal(k, self.precision))
        return self._f0[k]

    def g(self, n, k, theta):
        key = (n, k, theta)
        if key not in self._g:
            self._g[key] = rh_gap_term(n, k, theta, self.precision)
        return self._g[key]

    def F(self, n, k, L, literal=False):
        theta = 4 if literal else theta_multiplier(n, k)
        return self.f0(k) / L + self.g(n, k, theta)


def _grid(lo, hi, points, L):
    """Integer log-spaced grid on [lo, hi] plus both sides of every theta switch."""
    ratio = hi / lo
    pts = {lo, hi}
    for i in range(1, points - 1):
        pts.add(int(lo * ratio ** (i / (points - 1))))
    for n in range(1, L + 1):
        b = THETA_SWITCH // (n + 1)
        for c in (b, b + 1):
            if lo <= c <= hi:
                pts.add(c)
    return sorted(pts)


def _sum_F(cache, L, k, literal):
    total = None
    for n in range(1, L + 1):
        v = cache.F(n, k, L, literal)
        total = v if total is None else total + v
    return total


def _range_check(cache, L, lo, hi, points, literal):
    """(min sum enclosure, argmin k, worst monotone difference, where) on the grid."""
    grid = _grid(lo, hi, points, L)
    sums = [(_sum_F(cache, L, k, literal), k) for k in grid]
    smin, kmin = min(sums, key=lambda s: s[0].lower)
    worst, where = None, None
    for a, b in zip(grid, grid[1:]):
        for n in range(1, L + 1):
            if not literal and theta_multiplier(n, a) != theta_multiplier(n, b):
                continue
            d = cache.F(n, b, L, literal) - cache.F(n, a, L, literal)
            if worst is None or d.lower < worst.lower:
                worst, where = d, (n, a, b)
    return smin, kmin, worst, where


def _branch_conditions(cache, tag, L, lo, hi, points, report):
    """Positivity at the range start, grid positivity and grid monotonicity for one L."""
    out = []
    start = _sum_F(cache, L, lo, literal=False)
    start_lit = _sum_F(cache, L, lo, literal=True)
    out.append((positivity(f"{tag}:sum-at-start", f"sum_(n=1..{L}) F_n({lo}) > 0", start),
                positivity("", "", start_lit)))
    for pts in (points, 4 * points):
        smin, kmin, worst, where = _range_check(cache, L, lo, hi, pts, literal=False)
        if worst is None or worst.lower > 0:
            break
    lit = _range_check(cache, L, lo, hi, points, literal=True)
    out.append((positivity(f"{tag}:sum-on-grid",
                           f"sum_(n=1..{L}) F_n(k) > 0 on {pts}-point grid over [{lo}, {hi}]",
                           smin, argmin_k=kmin),
                positivity("", "", lit[0])))
    if worst is not None:
        out.append((positivity(f"{tag}:monotone", f"each F_n increasing in k on the grid over "
                                                  f"[{lo}, {hi}] (within fixed theta)",
                               worst, worst_at=list(where), grid_points=pts),
                    positivity("", "", lit[2])))
    for cond, literal in out:
        if not cond.certified and literal.certified:
            cond.literal_only = True
            report.flags.append(f"{cond.name} passes only with theta = 4 pi throughout")
        report.conditions.append(cond)


def verify_pair(L, kL, precision=PROOF_PRECISION, points=GRID_POINTS, upper=RH_LARGE_K, cache=None):
    cache = cache or _FCache(precision)
    report = ProofReport(f"T12_PAIR({L},{kL})", [], precision, RH.slug)
    _branch_conditions(cache, f"pair({L},{kL})", L, kL, upper, points, report)
    return report


def verify_theorem_1_2(precision=PROOF_PRECISION, points=GRID_POINTS, large_k_grid_top=100):
    """Certify every numerical step of the RH argument."""
    report = ProofReport("T12", [], precision, RH.slug)
    cache = _FCache(precision)
    K = RigorousReal(RH_LARGE_K, precision)
    lk = K.log()
    # (a) large k
    report.conditions.append(positivity(
        "large-k:step1", ".693 k / log^2 k - log k > 0 at k = 3e13",
        const(".693", precision) * K / lk**2 - lk))
    n_top = math.ceil((K * lk).log().upper - 1) - 1
    worst = None
    for n in range(1, n_top + 1):
        s = (n + 1) * K
        d = pi(precision) * K.sqrt() - 2 * RigorousReal(n + 1, precision) ** Fraction(3, 2) * s.log() ** 3
        if worst is None or d.lower < worst[0].lower:
            worst = (d, n)
    report.conditions.append(positivity(
        "large-k:rh-positivity", f"pi sqrt(k) > 2 (n+1)^1.5 log^3(nk+k) at k = 3e13, n = 1..{n_top}",
        worst[0], worst_n=worst[1]))
    # beyond the anchor the worst n is the largest admissible one
    worst = None
    for i in range(points):
        e = 13 + (large_k_grid_top - 13) * i / (points - 1)
        k = RH_LARGE_K if i == 0 else int(10**e) if e < 300 else 10 ** int(e)
        Kk = RigorousReal(k, precision)
        n = math.ceil((Kk * Kk.log()).log().upper - 1) - 1
        d = (pi(precision) * Kk.sqrt()
             - 2 * RigorousReal(n + 1, precision) ** Fraction(3, 2) * ((n + 1) * Kk).log() ** 3)
        if worst is None or d.lower < worst[0].lower:
            worst = (d, k, n)
    report.conditions.append(positivity(
        "large-k:rh-positivity-grid",
        f"same inequality at the largest admissible n on a grid of k in [3e13, 1e{large_k_grid_top}]",
        worst[0], worst_k=str(worst[1]), worst_n=worst[2]))
    # (b) table pairs
    for L, kL in pair_table():
        _branch_conditions(cache, f"pair({L},{kL})", L, kL, RH_LARGE_K, points, report)
    # (c) small L
    for L in range(1, 29):
        _branch_conditions(cache, f"generic(L={L})", L, RH_SMALL_K, RH_LARGE_K, points, report)
    # (d) bookkeeping on L
    for k in (RH_SMALL_K, RH_LARGE_K):
        Kk = RigorousReal(k, precision)
        lk = Kk.log()
        report.conditions.append(positivity(
            f"bookkeeping:log-bound@{k}", "1.13 log k - (log k + log log k) > 0",
            const("1.13", precision) * lk - lk - lk.log()))
    report.conditions.append(positivity(
        "bookkeeping:exponent", "1/1.13 - .88 > 0", 1 / const("1.13", precision) - const(".88", precision)))
    report.conditions.append(positivity(
        "bookkeeping:base-change", ".88 - .38 log 10 > 0",
        const(".88", precision) - const(".38", precision) * RigorousReal(10, precision).log()))
    upper, _ = _l_window(K, precision)
    report.conditions.append(positivity(
        "bookkeeping:L-max", "35 - log(k log k) > 0 at k = 3e13, so L <= 34", 35 - upper))
    _, lower = _l_window(RigorousReal(RH_SMALL_K, precision), precision)
    report.conditions.append(positivity(
        "bookkeeping:L-positive", "lower bound for L(k) at k = 1e11 is positive", lower))
    for L, kL in pair_table():
        report.conditions.append(positivity(
            f"bookkeeping:k_L({L})", "10^(.38 L) - k_L > 0",
            (const(".38", precision) * L * RigorousReal(10, precision).log()).exp() - kL))
    return _finish(report)
