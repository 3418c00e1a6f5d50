"""P-integer decision procedure and the residue-counting criterion.

``is_p_integer`` works straight from the definition.  The remaining
functions build the half-residue bookkeeping: the first T = phi(k) + omega(k)
primes are split by whether their residue mod k lies below k/2 (D'), at or
above it (D''), or divides k (D'''), and the prime-count sum S_L is compared
against log k.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import primes as pe
from .bounds import h_function
from .errors import DomainError, RangeTooLarge
from .rigorous import DEFAULT_PRECISION, RigorousReal


class Half(enum.Enum):
    LOW_HALF = "LOW_HALF"
    HIGH_HALF = "HIGH_HALF"


@dataclass(frozen=True)
class PIntegerVerdict:
    k: int
    is_p: bool
    collision: tuple | None
    checked_primes: int


@dataclass(frozen=True)
class ResidueClassification:
    k: pe.FactoredInteger
    T: int
    primes: np.ndarray = field(repr=False, compare=False)
    d1: int
    d2: int
    d3: int
    t: int
    L: int
    case: Half
    p_T: int
    formula_d1_minus_d2: int
    boundary_correction: int

    @property
    def identity_holds(self):
        return self.d1 - self.d2 == self.formula_d1_minus_d2 + self.boundary_correction


@dataclass(frozen=True)
class CriterionReport:
    k: int
    T: int | None
    t: int | None
    L: int | None
    case: str | None
    d1: int | None
    d2: int | None
    d3: int | None
    s_L: int | None
    log_k_upper: str
    criterion: object  # True, False or "indeterminate"
    omega_below_log: bool | None = None

    def to_dict(self):
        return {
            "k": self.k, "T": self.T, "t": self.t, "L": self.L, "case": self.case,
            "d1": self.d1, "d2": self.d2, "d3": self.d3, "s_L": self.s_L,
            "log_k_upper": self.log_k_upper, "criterion": self.criterion,
        }


def _engine(engine):
    return engine or pe.get_engine()


def _as_factored(k):
    return k if isinstance(k, pe.FactoredInteger) else pe.factorize(k)


def coprime_prime_prefix(k, engine=None):
    """The first T = phi(k) + omega(k) primes tagged ``True`` when they divide k."""
    fk = _as_factored(k)
    T = fk.phi + fk.omega
    engine = _engine(engine)
    ps = engine.first_primes(T)
    return [(int(p), fk.k % int(p) == 0) for p in ps]


def is_p_integer(k, engine=None):
    """Decide from the definition whether the first phi(k) primes coprime to k are a
    reduced residue system mod k.

    Primes below k are their own residues, so a collision can only involve a
    prime above k; we scan those in order and stop at the first repeat.
    """
    k = int(k)
    if k < 2:
        raise DomainError("k must be at least 2")
    engine = _engine(engine)
    fk = pe.factorize(k)
    below = engine.pi_exact(k) - fk.omega
    if below >= fk.phi:
        return PIntegerVerdict(k, True, None, fk.phi)
    count = below
    seen = np.zeros(k, dtype=bool)
    small = engine.small_table if k <= pe.SMALL_LIMIT else None
    scanned = []
    a = k + 1
    span = 1 << 9
    while True:
        ps = engine.primes_in(a, a + span).primes()[: fk.phi - count]
        if len(ps):
            r = ps % k
            if small is not None:
                prime_res = small[r]
            else:
                prime_res = np.fromiter((pe.is_prime(int(x)) for x in r), bool, len(r))
            hits = [np.flatnonzero(prime_res | seen[r])]
            order = np.argsort(r, kind="stable")
            rs = r[order]
            hits.append(order[1:][rs[1:] == rs[:-1]])
            first = min((int(h.min()) for h in hits if len(h)), default=None)
            if first is not None:
                p, res = int(ps[first]), int(r[first])
                if prime_res[first]:
                    partner = res
                else:
                    earlier = scanned + [int(x) for x in ps[:first]]
                    partner = next(q for q in earlier if q % k == res)
                return PIntegerVerdict(k, False, (partner, p), count + first + 1)
            seen[r] = True
            scanned.extend(int(x) for x in ps)
            count += len(ps)
            if count == fk.phi:
                return PIntegerVerdict(k, True, None, count)
        a += span
        span = min(2 * span, 1 << 20)


def _pi_points(engine, pts):
    return dict(zip(pts, engine.pi_many(pts)))


def _formula(k, t, case, T, pi):
    half = k / 2
    total = 0
    top = t - 1 if case is Half.LOW_HALF else t
    for n in range(top + 1):
        total += 2 * pi[math.floor(n * k + half)] - pi[n * k] - pi[n * k + k]
    if case is Half.LOW_HALF:
        return total + T - pi[t * k]
    return total + pi[t * k + k] - T


def classify_residues(k, engine=None):
    """Half-residue classification of the first T primes for modulus ``k``."""
    fk = _as_factored(k)
    k = fk.k
    if k < 2:
        raise DomainError("k must be at least 2")
    engine = _engine(engine)
    T = fk.phi + fk.omega
    ps = engine.first_primes(T)
    p_T = int(ps[-1])
    assert len(ps) == T
    res = ps % k
    d3 = int(np.count_nonzero(k % ps == 0))
    d1 = int(np.count_nonzero(2 * res < k))
    d2 = T - d1
    t = p_T // k
    if t < 1:
        raise AssertionError(f"p_T = {p_T} does not exceed k = {k}")
    r_T = p_T - t * k
    if 2 * r_T == k and k != 2:
        raise AssertionError(f"p_T = {p_T} sits exactly at t*k + k/2")
    case = Half.LOW_HALF if 2 * r_T < k else Half.HIGH_HALF
    L = t - 1 if case is Half.LOW_HALF else t
    pts = set()
    for n in range(t + 1):
        pts.update((math.floor(n * k + k / 2), n * k, n * k + k))
    pi = _pi_points(engine, sorted(pts))
    formula = _formula(k, t, case, T, pi)
    # The block sums assign a prime p = nk to the upper half of block n-1 and a
    # prime p = nk + k/2 to a lower half; by residue they belong to D' and D''.
    correction = 2 * (int(np.count_nonzero(res == 0)) - int(np.count_nonzero(2 * res == k)))
    return ResidueClassification(fk, T, ps, d1, d2, d3, t, L, case, p_T, formula, correction)


def s_L_sum(k, L, engine=None):
    """S_L = sum_{n=0}^{L} (2 pi(nk + k/2) - pi(nk) - pi(nk + k)) from exact counts."""
    engine = _engine(engine)
    pts = set()
    for n in range(L + 1):
        pts.update((math.floor(n * k + k / 2), n * k, n * k + k))
    pi = _pi_points(engine, sorted(pts))
    return sum(2 * pi[math.floor(n * k + k / 2)] - pi[n * k] - pi[n * k + k] for n in range(L + 1))


def s_L_exact(k, engine=None, classification=None):
    c = classification or classify_residues(k, engine)
    return s_L_sum(c.k.k, c.L, engine)


def log_k_upper(k, precision=DEFAULT_PRECISION):
    return RigorousReal(k, precision).log()


def criterion_report(k, engine=None, precision=DEFAULT_PRECISION):
    """Full criterion record; ``criterion`` is ``"indeterminate"`` beyond the sieve ceiling."""
    k = int(k)
    if k < 2:
        raise DomainError("k must be at least 2")
    logk = log_k_upper(k, precision)
    try:
        c = classify_residues(k, engine)
        s = s_L_exact(k, engine, c)
    except RangeTooLarge:
        return CriterionReport(k, None, None, None, None, None, None, None, None,
                               logk.upper_str(), "indeterminate")
    omega_ok = c.k.omega < logk.lower
    holds = bool(omega_ok and s > logk.upper)
    return CriterionReport(k, c.T, c.t, c.L, c.case.value, c.d1, c.d2, c.d3, s,
                           logk.upper_str(), holds, omega_ok)


def criterion_holds(k, engine=None, precision=DEFAULT_PRECISION):
    """True when S_L exceeds log k, which certifies that k is not a P-integer.

    The deduction also needs omega(k) < log k; that is re-checked here and the
    criterion is reported as not holding where it fails.
    """
    rep = criterion_report(k, engine, precision)
    if rep.criterion == "indeterminate":
        raise RangeTooLarge(f"criterion for k={k} needs primes beyond the sieve ceiling")
    return rep.criterion


def l_bounds(k, precision=DEFAULT_PRECISION):
    """(upper, lower) enclosures: L <= t < log(k log k) and L > (log k - log h(k)) / h(k) - 2."""
    if k < 3:
        raise DomainError("l_bounds needs k >= 3")
    K = RigorousReal(k, precision)
    lk = K.log()
    upper = (K * lk).log()
    h = h_function(k, precision)
    lower = (lk - h.log()) / h - 2
    return upper, lower
