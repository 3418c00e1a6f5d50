"""Explicit prime-counting inequalities evaluated in interval arithmetic.

Each function returns a :class:`~pomverify.rigorous.RigorousReal` that
encloses the right-hand side of one published inequality.  The
inequalities themselves (Dusart, Rosser-Schoenfeld, Schoenfeld under RH)
are taken as given; what is certified here is only their numerical value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv, mp

from .errors import DomainError, ProfileError
from .rigorous import (
    DEFAULT_PRECISION,
    RigorousReal,
    euler_gamma,
    pi,
    working_precision,
)

DUSART_LOWER_THRESHOLD = 88783
# the lower bound is quoted for x > 88783 but fails for 88783 < x < 88789
DUSART_LOWER_VALID_FROM = 88789
DUSART_UPPER_THRESHOLD = 355991
UNCONDITIONAL_GAP_THRESHOLD = 58
RH_GAP_THRESHOLD = 2656
STEP1_THRESHOLD = 712000
GEN_GAP_THRESHOLD = 59
RH_GAP_LOWER_THRESHOLD = 2657
THETA_SWITCH = 10**14


@dataclass(frozen=True)
class BoundProfile:
    """Named set of analytic constants; ``R`` is the zero-free-region constant."""

    name: str
    R: str
    rh_assumed: bool = False
    certifying: bool = True

    @property
    def slug(self):
        return self.name.lower().replace("_", "-")


UNCONDITIONAL = BoundProfile("UNCONDITIONAL", "9.646")
RH = BoundProfile("RH", "9.646", rh_assumed=True)
KADIRI_EXPERIMENTAL = BoundProfile("KADIRI_EXPERIMENTAL", "5.69693", certifying=False)

PROFILES = {p.slug: p for p in (UNCONDITIONAL, RH, KADIRI_EXPERIMENTAL)}


def profile_by_name(name):
    key = name.lower().replace("_", "-")
    if key == "kadiri":
        key = "kadiri-experimental"
    try:
        return PROFILES[key]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}") from None


def const(text, precision=DEFAULT_PRECISION):
    """Enclosure of a decimal literal such as ``"1.7576"``."""
    return RigorousReal(text, precision)


def _real(x, precision):
    if isinstance(x, RigorousReal):
        return x if x.precision >= precision else RigorousReal((x.lower, x.upper), precision)
    if isinstance(x, float) and not x.is_integer():
        # floats are exact binary numbers; keep them exact
        return RigorousReal(Fraction(x), precision)
    return RigorousReal(x, precision)


def _above(x, threshold):
    """True when x certainly exceeds threshold."""
    return x.lower > threshold


def _at_least(x, threshold):
    return x.lower >= threshold


# logarithmic integral


def li(x, precision=DEFAULT_PRECISION):
    """Enclosure of the principal-value logarithmic integral Li(x) for x > 1.

    Uses Li(x) = gamma + log log x + sum_{m>=1} (log x)^m / (m * m!), with the
    series tail bounded by a geometric majorant once m exceeds 2 log x.
    """
    x = _real(x, precision)
    if not x.lower > 1:
        raise DomainError("li needs x > 1")
    gamma = euler_gamma(precision)
    guard = precision + 16
    with working_precision(guard):
        u = iv.log(x._v)
        u_hi = mp.make_mpf(u._mpi_[1])
        term = u  # u^m / m!
        total = u
        m = 1
        eps = mp.ldexp(1, -guard)
        while True:
            m += 1
            term = term * u / m
            contrib = term / m
            total = total + contrib
            if m > 2 * u_hi + 2:
                c_hi = mp.make_mpf(contrib._mpi_[1])
                t_lo = mp.make_mpf(total._mpi_[0])
                if c_hi < eps * t_lo:
                    break
        # sum_{j>m} u^j/(j j!) <= u^{m+1}/((m+1)(m+1)!) / (1 - u/(m+2))
        nxt = term * u / (m + 1) / (m + 1)
        ratio = u / (m + 2)
        tail_hi = mp.make_mpf((nxt / (1 - ratio))._mpi_[1])
        total = total + iv.mpf([0, tail_hi])
        value = gamma._v + iv.log(u) + total
    return RigorousReal._wrap(value, precision)


# explicit inequalities


def pi_bounds_dusart(x, precision=DEFAULT_PRECISION):
    """(lower, upper) Dusart bounds on pi(x); a component is None when not applicable."""
    x = _real(x, precision)
    lower = upper = None
    if _at_least(x, DUSART_LOWER_VALID_FROM):
        L = x.log()
        main = x / L + x / L**2
        lower = main + 2 * x / L**3
        if _above(x, DUSART_UPPER_THRESHOLD):
            upper = main + const("2.51", precision) * x / L**3
    return lower, upper


def pi_li_gap(x, profile=UNCONDITIONAL, precision=DEFAULT_PRECISION):
    """Enclosure of the profile's bound on |pi(x) - Li(x)|."""
    x = _real(x, precision)
    if profile.rh_assumed:
        if not _above(x, RH_GAP_THRESHOLD):
            raise DomainError(f"RH error term needs x > {RH_GAP_THRESHOLD}")
        L = x.log()
        return x.sqrt() * L / (8 * pi(precision))
    if not _at_least(x, UNCONDITIONAL_GAP_THRESHOLD):
        raise DomainError(f"unconditional error term needs x >= {UNCONDITIONAL_GAP_THRESHOLD}")
    L = x.log()
    R = const(profile.R, precision)
    return const(".4394", precision) * x * (L ** Fraction(-3, 4)) * (-(L / R).sqrt()).exp()


def nth_prime_bounds(n, precision=DEFAULT_PRECISION):
    """(n log n, n(log n + log log n)); the upper bound is None for n < 6."""
    n = int(n)
    if n < 1:
        raise DomainError("nth_prime_bounds needs n >= 1")
    N = RigorousReal(n, precision)
    if n == 1:
        return RigorousReal(0, precision), None
    L = N.log()
    lower = N * L
    upper = N * (L + L.log()) if n >= 6 else None
    return lower, upper


def h_function(n, precision=DEFAULT_PRECISION):
    """1.7811 log log n + 2.51 / log log n, an upper bound for n / phi(n) when n >= 3."""
    if n < 3:
        raise DomainError("h_function needs n >= 3")
    ll = _real(n, precision).log().log()
    return const("1.7811", precision) * ll + const("2.51", precision) / ll


def step1_gap_lower(x, precision=DEFAULT_PRECISION):
    """0.693 x / log^2 x, a lower bound for 2 pi(x/2) - pi(x) when x > 712000."""
    x = _real(x, precision)
    if not _above(x, STEP1_THRESHOLD):
        raise DomainError(f"step1_gap_lower needs x > {STEP1_THRESHOLD}")
    return const(".693", precision) * x / x.log() ** 2


def _check_xy(x, y, threshold):
    if not (y.lower > 0 and x.lower > y.upper and x.lower >= threshold):
        raise DomainError(f"need x > y > 0 and x >= {threshold}")


def mean_value_term(x, y):
    """y^2 / ((x + 2y) log^2(x + 2y)), the Li second-difference lower bound."""
    s = x + 2 * y
    return y * y / (s * s.log() ** 2)


def gen_gap_lower(x, y, profile=UNCONDITIONAL, precision=DEFAULT_PRECISION):
    """Unconditional lower bound for 2 pi(x+y) - pi(x) - pi(x+2y); may be negative."""
    x, y = _real(x, precision), _real(y, precision)
    _check_xy(x, y, GEN_GAP_THRESHOLD)
    s = x + 2 * y
    lx = x.log()
    R = const(profile.R, precision)
    err = const("1.7576", precision) * s * lx ** Fraction(-3, 4) * (-(lx / R).sqrt()).exp()
    return mean_value_term(x, y) - err


def rh_theta_multiplier(s):
    """Multiple of pi used as theta: 4 when x + 2y <= 10**14 certainly, else 2."""
    s = s if isinstance(s, RigorousReal) else RigorousReal(s, DEFAULT_PRECISION)
    return 4 if s.upper <= THETA_SWITCH else 2


def rh_gap_lower(x, y, profile=RH, precision=DEFAULT_PRECISION, theta_multiplier=None):
    """Lower bound for 2 pi(x+y) - pi(x) - pi(x+2y) under RH.

    ``theta_multiplier`` overrides the automatic choice of theta = 2 pi or 4 pi.
    """
    if not profile.rh_assumed:
        raise ProfileError("rh_gap_lower requires the RH profile")
    x, y = _real(x, precision), _real(y, precision)
    _check_xy(x, y, RH_GAP_LOWER_THRESHOLD)
    s = x + 2 * y
    mult = theta_multiplier or rh_theta_multiplier(s)
    return mean_value_term(x, y) - s.log() / (mult * pi(precision)) * s.sqrt()


# tabulation


def bounds_table(xs, profile=UNCONDITIONAL, precision=DEFAULT_PRECISION, pi_values=None):
    """Rows for the ``bounds`` report; ``pi_values`` may supply exact counts."""
    from .primes import pi_many

    xs = [int(x) for x in xs]
    if pi_values is None:
        pi_values = pi_many(xs)
    rows = []
    for x, px in zip(xs, pi_values):
        lo, hi = pi_bounds_dusart(x, precision)
        row = {
            "x": x,
            "pi_exact": px,
            "dusart_lower": lo.lower_str() if lo else "",
            "dusart_upper": hi.upper_str() if hi else "",
            "li_lower": "",
            "li_upper": "",
            "gap_bound": "",
            "profile": profile.slug,
        }
        if x > 1:
            v = li(x, precision)
            row["li_lower"], row["li_upper"] = v.lower_str(), v.upper_str()
        try:
            row["gap_bound"] = pi_li_gap(x, profile, precision).upper_str()
        except DomainError:
            pass
        rows.append(row)
    return rows


BOUNDS_COLUMNS = ("x", "pi_exact", "dusart_lower", "dusart_upper", "li_lower", "li_upper",
                  "gap_bound", "profile")
