"""Exact prime arithmetic: primality, segmented sieving, pi(x), p_n, factorization.

Everything here is exact and serves as the ground truth that the bound
evaluations and the scanners are checked against.  Counting queries go
through a checkpoint table of ``(x, pi(x))`` pairs so that ``pi_exact`` never
needs to sieve more than one checkpoint stride.
"""

from __future__ import annotations

import bisect
import math
import os
import struct
import threading
from dataclasses import dataclass, field
from math import gcd, isqrt
from pathlib import Path

import numpy as np

from .errors import RangeTooLarge, WindowInvalid

DEFAULT_X_MAX = 10**9
DEFAULT_SEGMENT_SIZE = 1 << 20
DEFAULT_CHECKPOINT_STRIDE = 10**7
SMALL_LIMIT = 1 << 22
TRIAL_DIVISION_LIMIT = 10**6
CACHE_MAGIC = b"PIEXACT1"
ENV_CEILING = "POMVERIFY_SIEVE_CEILING"

# Jaeschke / Sorenson-Webster: the first 12 primes decide every n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def simple_sieve(limit):
    """Boolean primality table for ``0..limit`` (inclusive)."""
    limit = int(limit)
    table = np.ones(max(limit + 1, 2), dtype=bool)
    table[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if table[p]:
            table[p * p :: p] = False
    return table[: limit + 1]


def is_prime(n):
    """Deterministic Miller-Rabin, exact for every ``n < 2**64``."""
    n = int(n)
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n):
    """Smallest prime strictly greater than ``n``."""
    n = int(n) + 1
    if n <= 2:
        return 2
    if n % 2 == 0:
        n += 1
    while not is_prime(n):
        n += 2
    return n


@dataclass(frozen=True)
class SieveConfig:
    x_max: int = DEFAULT_X_MAX
    segment_size: int = DEFAULT_SEGMENT_SIZE
    checkpoint_stride: int = DEFAULT_CHECKPOINT_STRIDE
    cache_path: str | None = None

    @classmethod
    def from_env(cls, **overrides):
        ceiling = os.environ.get(ENV_CEILING)
        if ceiling and "x_max" not in overrides:
            overrides["x_max"] = int(float(ceiling))
        return cls(**overrides)


@dataclass(frozen=True, eq=False)
class PrimeSegment:
    """Primality bits for the half-open range ``[lo, hi)``."""

    lo: int
    hi: int
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.lo < 0 or self.hi < self.lo or len(self.bits) != self.hi - self.lo:
            raise ValueError("inconsistent segment bounds")

    def primes(self):
        return np.flatnonzero(self.bits).astype(np.int64) + self.lo

    def __iter__(self):
        return (int(p) for p in self.primes())

    def __len__(self):
        return self.hi - self.lo

    def count(self):
        return int(np.count_nonzero(self.bits))

    def __contains__(self, n):
        return self.lo <= n < self.hi and bool(self.bits[n - self.lo])


class PrimeEngine:
    """Sieve-backed exact prime queries below a configured ceiling."""

    def __init__(self, config=None):
        self.config = config or SieveConfig.from_env()
        self._lock = threading.Lock()
        self._small = simple_sieve(SMALL_LIMIT)
        self._small_pi = np.cumsum(self._small, dtype=np.int64)
        self._small_primes = np.flatnonzero(self._small).astype(np.int64)
        base_limit = isqrt(self.config.x_max) + 2
        if base_limit > SMALL_LIMIT:
            self._base = np.flatnonzero(simple_sieve(base_limit)).astype(np.int64)
        else:
            self._base = self._small_primes[self._small_primes <= base_limit]
        stride = self.config.checkpoint_stride
        self._ckpt_x = [0]
        self._ckpt_pi = [0]
        self._ckpt_stride = stride
        if self.config.cache_path:
            self._load_cache(self.config.cache_path)

    @property
    def small_table(self):
        """Read-only primality lookup for ``0..SMALL_LIMIT``."""
        return self._small

    # sieving

    def _check_ceiling(self, hi):
        if hi > self.config.x_max:
            raise RangeTooLarge(f"{hi} exceeds the sieve ceiling {self.config.x_max}")

    def _segment_bits(self, lo, hi):
        if hi <= SMALL_LIMIT + 1:
            return self._small[lo:hi].copy()
        bits = np.ones(hi - lo, dtype=bool)
        if lo < 2:
            bits[: min(2, hi) - lo] = False
        lim = isqrt(hi - 1)
        for p in self._base[: np.searchsorted(self._base, lim, side="right")]:
            p = int(p)
            start = max(p * p, -(-lo // p) * p)
            bits[start - lo :: p] = False
        return bits

    def iter_segments(self, lo, hi):
        """Yield consecutive :class:`PrimeSegment` blocks covering ``[lo, hi)``."""
        self._check_ceiling(hi - 1 if hi > lo else lo)
        size = self.config.segment_size
        a = lo
        while a < hi:
            b = min(a + size, hi)
            yield PrimeSegment(a, b, self._segment_bits(a, b))
            a = b

    def primes_in(self, lo, hi):
        lo, hi = int(lo), int(hi)
        if lo > hi:
            raise ValueError("lo must not exceed hi")
        if hi > self.config.x_max:
            raise RangeTooLarge(f"{hi} exceeds the sieve ceiling {self.config.x_max}")
        if hi - lo <= self.config.segment_size:
            return PrimeSegment(lo, hi, self._segment_bits(lo, hi))
        parts = [s.bits for s in self.iter_segments(lo, hi)]
        return PrimeSegment(lo, hi, np.concatenate(parts))

    # counting

    def _extend_checkpoints(self, x):
        stride = self._ckpt_stride
        while self._ckpt_x[-1] + stride <= x:
            a = self._ckpt_x[-1]
            b = a + stride
            n = sum(s.count() for s in self.iter_segments(a + 1, b + 1))
            self._ckpt_x.append(b)
            self._ckpt_pi.append(self._ckpt_pi[-1] + n)

    def _count_between(self, a, b):
        """Number of primes in ``(a, b]``."""
        if b <= a:
            return 0
        return sum(s.count() for s in self.iter_segments(a + 1, b + 1))

    def pi_exact(self, x):
        """Exact prime-counting function; real arguments are floored."""
        n = math.floor(x)
        if n < 2:
            return 0
        if n <= SMALL_LIMIT:
            return int(self._small_pi[n])
        self._check_ceiling(n)
        with self._lock:
            self._extend_checkpoints(n)
            i = bisect.bisect_right(self._ckpt_x, n) - 1
            c, base = self._ckpt_x[i], self._ckpt_pi[i]
        return base + self._count_between(c, n)

    def pi_many(self, xs):
        """Exact pi at many points with a single sweep (returns a list aligned with ``xs``)."""
        pts = [math.floor(x) for x in xs]
        if not pts:
            return []
        top = max(pts)
        self._check_ceiling(top)
        order = sorted(range(len(pts)), key=pts.__getitem__)
        out = [0] * len(pts)
        big = [i for i in order if pts[i] > SMALL_LIMIT]
        for i in order:
            if pts[i] <= SMALL_LIMIT:
                out[i] = int(self._small_pi[pts[i]]) if pts[i] >= 2 else 0
        if not big:
            return out
        # SMALL_LIMIT is not in general a checkpoint, so start the sweep there.
        running = int(self._small_pi[SMALL_LIMIT])
        j = 0
        for seg in self.iter_segments(SMALL_LIMIT + 1, pts[big[-1]] + 1):
            primes = seg.primes()
            while j < len(big) and pts[big[j]] < seg.hi:
                out[big[j]] = running + int(np.searchsorted(primes, pts[big[j]], side="right"))
                j += 1
            running += len(primes)
        return out

    def nth_prime(self, n):
        n = int(n)
        if n < 1:
            raise ValueError("n must be at least 1")
        if n <= len(self._small_primes):
            return int(self._small_primes[n - 1])
        # p_n < n(log n + log log n) for n >= 6
        est = n * (math.log(n) + math.log(math.log(n)))
        if est > self.config.x_max:
            # the bound may be loose; fall back to the exact count at the ceiling
            if self.pi_exact(self.config.x_max) < n:
                raise RangeTooLarge(f"p_{n} exceeds the sieve ceiling {self.config.x_max}")
        with self._lock:
            self._extend_checkpoints(min(int(est) + 1, self.config.x_max))
            i = bisect.bisect_left(self._ckpt_pi, n) - 1
            c, count = self._ckpt_x[i], self._ckpt_pi[i]
        for seg in self.iter_segments(c + 1, self.config.x_max + 1):
            k = seg.count()
            if count + k >= n:
                return int(seg.primes()[n - count - 1])
            count += k
        raise RangeTooLarge(f"p_{n} exceeds the sieve ceiling {self.config.x_max}")

    def first_primes(self, n):
        """The first ``n`` primes as an int64 array."""
        if n <= len(self._small_primes):
            return self._small_primes[:n]
        return self.primes_in(0, self.nth_prime(n) + 1).primes()

    def primes_after(self, x, count):
        """The ``count`` smallest primes strictly greater than ``x``."""
        out = []
        a = int(x) + 1
        span = max(4096, 64 * count)
        while len(out) < count:
            b = a + span
            if b - 1 > self.config.x_max:
                b = self.config.x_max + 1
                if b <= a:
                    raise RangeTooLarge("window would exceed the sieve ceiling")
            seg = self.primes_in(a, b)
            out.extend(int(p) for p in seg.primes()[: count - len(out)])
            a = b
        return out

    # checkpoint cache file

    def save_cache(self, path):
        with self._lock:
            pairs = list(zip(self._ckpt_x, self._ckpt_pi))
        tmp = Path(str(path) + ".tmp")
        with open(tmp, "wb") as fh:
            fh.write(CACHE_MAGIC)
            fh.write(struct.pack("<Q", self._ckpt_stride))
            for x, c in pairs:
                fh.write(struct.pack("<QQ", x, c))
        os.replace(tmp, path)

    def _load_cache(self, path):
        xs, pis = read_pi_cache(path)
        if len(xs) < 2:
            return
        stride = xs[1] - xs[0]
        if stride != self._ckpt_stride:
            return
        self._ckpt_x, self._ckpt_pi = xs, pis

def read_pi_cache(path):
    """Parse a PIEXACT1 checkpoint file into parallel lists ``(xs, pis)``."""
    data = Path(path).read_bytes()
    if not data.startswith(CACHE_MAGIC):
        raise ValueError(f"{path}: bad magic, expected {CACHE_MAGIC!r}")
    body = data[len(CACHE_MAGIC) + 8 :]
    if len(body) % 16:
        raise ValueError(f"{path}: truncated record")
    xs, pis = [], []
    for x, c in struct.iter_unpack("<QQ", body):
        xs.append(x)
        pis.append(c)
    return xs, pis


_default_engine = None
_engine_lock = threading.Lock()


def get_engine():
    global _default_engine
    with _engine_lock:
        if _default_engine is None:
            _default_engine = PrimeEngine()
        return _default_engine


def set_engine(engine):
    """Install ``engine`` as the process-wide default; returns the previous one."""
    global _default_engine
    with _engine_lock:
        prev, _default_engine = _default_engine, engine
    return prev


def primes_in(lo, hi):
    return get_engine().primes_in(lo, hi)


def pi_exact(x):
    return get_engine().pi_exact(x)


def pi_many(xs):
    return get_engine().pi_many(xs)


def nth_prime(n):
    return get_engine().nth_prime(n)


# factorization


def _pollard_brent(n):
    if n % 2 == 0:
        return 2
    for c in range(1, 200):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"Pollard rho failed on {n}")


def _split(n, out):
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = isqrt(n)
    if r * r == n:
        _split(r, out)
        _split(r, out)
        return
    d = _pollard_brent(n)
    _split(d, out)
    _split(n // d, out)


@dataclass(frozen=True)
class FactoredInteger:
    k: int
    factors: tuple  # ((prime, exponent), ...) with increasing primes
    phi: int
    omega: int

    @property
    def primes(self):
        return tuple(p for p, _ in self.factors)

    def divides(self, p):
        return self.k % p == 0


def factorize(k):
    """Factor ``k >= 2``: trial division by primes up to 10**6, then Pollard-Brent."""
    k = int(k)
    if k < 2:
        raise ValueError("factorize needs k >= 2")
    out = {}
    n = k
    for p in _TRIAL:
        p = int(p)
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        _split(n, out)
    factors = tuple(sorted(out.items()))
    phi = k
    for p, _ in factors:
        phi = phi // p * (p - 1)
    return FactoredInteger(k, factors, phi, len(factors))


_TRIAL = np.flatnonzero(simple_sieve(TRIAL_DIVISION_LIMIT)).astype(np.int64)


# prime windows


@dataclass(frozen=True)
class PrimeWindow:
    """The ``size`` smallest primes exceeding ``base + 1``."""

    base: int
    primes: tuple
    next_index: int  # ordinal of primes[-1] in 2, 3, 5, ...

    @property
    def size(self):
        return len(self.primes)

    @classmethod
    def at(cls, base, size=100, engine=None):
        engine = engine or get_engine()
        primes = tuple(engine.primes_after(base + 1, size))
        return cls(base, primes, engine.pi_exact(base + 1) + size)

    def validate(self, base=None):
        base = self.base if base is None else base
        if base != self.base:
            raise WindowInvalid(f"window built for base {self.base}, used with {base}")
        if any(a >= b for a, b in zip(self.primes, self.primes[1:])):
            raise WindowInvalid("window primes not strictly increasing")
        if self.primes and self.primes[0] <= base + 1:
            raise WindowInvalid("window holds a prime not exceeding base + 1")


def window_advance(w, new_base, engine=None):
    """Move ``w`` to ``new_base``: drop primes <= new_base + 1, append as many successors."""
    if new_base < w.base:
        raise ValueError("windows only move forward")
    if new_base == w.base:
        return w
    engine = engine or get_engine()
    keep = [p for p in w.primes if p > new_base + 1]
    dropped = len(w.primes) - len(keep)
    if not keep:
        return PrimeWindow.at(new_base, len(w.primes), engine)
    if dropped:
        keep.extend(engine.primes_after(keep[-1], dropped))
    return PrimeWindow(new_base, tuple(keep), w.next_index + dropped)
