"""Rolling-window witness scan over even moduli.

For even k the window is the 100 smallest primes above k + 1.  The first
window prime p whose residue q = p mod k is itself prime is a witness: p and
q are two of the first phi(k) primes coprime to k and share a residue class,
so k is not a P-integer.  Preconditions guarantee that the whole window lies
inside that prefix.  A witness for 2m with m odd transfers to m because
phi(m) = phi(2m) and every window prime stays below 3m.

The inner loop runs in a numba kernel over sieved blocks; blocks are aligned
to the scan start so sharding and resuming never change the results.
"""

from __future__ import annotations

import enum
import json
import logging
import math
import os
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from . import primes as pe
from .bounds import DUSART_UPPER_THRESHOLD, h_function, nth_prime_bounds, pi_bounds_dusart
from .errors import InapplicableWitness, Indeterminate, RangeTooLarge
from .rigorous import RigorousReal

log = logging.getLogger(__name__)

WINDOW = 100
SCAN_START = 550000
DEFAULT_BLOCK = 1 << 20
SCHEMA = "pomverify.scan/1"

_OK, _PRECONDITION, _NO_WITNESS, _OVERFLOW = 0, 1, 2, 3
_REASONS = {_PRECONDITION: "precondition", _NO_WITNESS: "no-witness"}


class Mode(str, enum.Enum):
    EVEN_DIRECT = "EVEN_DIRECT"
    ODD_VIA_DOUBLE = "ODD_VIA_DOUBLE"


@dataclass(frozen=True)
class Witness:
    k: int
    p: int
    q: int
    mode: Mode = Mode.EVEN_DIRECT

    @property
    def modulus(self):
        return self.k if self.mode is Mode.EVEN_DIRECT else 2 * self.k

    def to_dict(self):
        return {"k": self.k, "p": self.p, "q": self.q, "mode": Mode(self.mode).value}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["k"]), int(d["p"]), int(d["q"]), Mode(d["mode"]))


# preconditions


def _preconditions_bounds(k, window=WINDOW, precision=128):
    """Certified check of both preconditions from the explicit bounds, or None."""
    if k + 1 <= DUSART_UPPER_THRESHOLD:
        return None
    _, pi_up = pi_bounds_dusart(k + 1, precision)
    n_max = math.floor(pi_up.upper) + window
    phi_low = RigorousReal(k, precision) / h_function(k, precision)
    cond1 = phi_low.lower > n_max
    _, pn_up = nth_prime_bounds(n_max, precision)
    cond2 = pn_up is not None and 2 * pn_up.upper < 3 * k
    if cond1 and cond2:
        return True
    return None


def _preconditions_exact(k, window=WINDOW, engine=None):
    engine = engine or pe.get_engine()
    n = engine.pi_exact(k + 1) + window
    if not n < pe.factorize(k).phi:
        return False
    return 2 * engine.nth_prime(n) < 3 * k


def preconditions(k, window=WINDOW, engine=None, method="auto"):
    """pi(k+1) + W < phi(k) and p_{pi(k+1)+W} < 1.5 k.

    ``method`` is ``"exact"`` (sieve and factorization), ``"bounds"``
    (explicit inequalities only) or ``"auto"`` (exact below the sieve
    ceiling, bounds above it).
    """
    k = int(k)
    if k < 2:
        raise ValueError("k must be at least 2")
    engine = engine or pe.get_engine()
    if method == "bounds":
        res = _preconditions_bounds(k, window)
        if res is None:
            raise Indeterminate(f"explicit bounds do not decide the preconditions at k={k}")
        return res
    if method == "auto":
        try:
            return _preconditions_exact(k, window, engine)
        except RangeTooLarge:
            res = _preconditions_bounds(k, window)
            if res is None:
                raise Indeterminate(f"preconditions undecided at k={k}") from None
            return res
    return _preconditions_exact(k, window, engine)


# single-k operations


def find_witness_even(k, w):
    """First window prime whose residue mod k is prime, as an EVEN_DIRECT witness."""
    if k % 2:
        raise ValueError("find_witness_even needs an even modulus")
    w.validate(k)
    for p in w.primes:
        q = p % k
        if pe.is_prime(q):
            return Witness(k, p, q, Mode.EVEN_DIRECT)
    return None


def derive_odd_witness(k_odd, w2k):
    """Transfer an even witness for 2 * k_odd to k_odd."""
    if k_odd % 2 == 0:
        raise ValueError("derive_odd_witness needs an odd k")
    if Mode(w2k.mode) is not Mode.EVEN_DIRECT or w2k.k != 2 * k_odd:
        raise InapplicableWitness("witness is not an even witness for 2k")
    if w2k.p >= 3 * k_odd:
        raise InapplicableWitness(f"p = {w2k.p} is not below 3k = {3 * k_odd}")
    return Witness(k_odd, w2k.p, w2k.p % (2 * k_odd), Mode.ODD_VIA_DOUBLE)


def verify_witness(wit, window=WINDOW, engine=None):
    """Re-check a witness from scratch; returns False on any failed check."""
    try:
        k, p, q = int(wit.k), int(wit.p), int(wit.q)
        mode = Mode(wit.mode)
        if mode is Mode.EVEN_DIRECT:
            if k % 2:
                return False
            m = k
        else:
            if k % 2 == 0 or not q < k:
                return False
            m = 2 * k
        if not (p > m and q == p % m and q > 1 and k % q != 0):
            return False
        if not (pe.is_prime(p) and pe.is_prime(q)):
            return False
        engine = engine or pe.get_engine()
        # p must be among the first pi(m+1) + W primes
        if engine.primes_in(m + 2, p + 1).count() > window:
            return False
        ok = _preconditions_bounds(m, window)
        if ok is None:
            ok = _preconditions_exact(m, window, engine)
        return bool(ok)
    except (Indeterminate, RangeTooLarge, ValueError):
        return False


# block kernel


@njit(cache=True)
def _scan_kernel(klo, n_even, P, base_pi, phi, isq, W):
    wit = np.zeros(n_even, np.int64)
    status = np.zeros(n_even, np.int8)
    start = 0
    nP = len(P)
    for i in range(n_even):
        k = klo + 2 * i
        while start < nP and P[start] <= k + 1:
            start += 1
        if start + W > nP:
            status[i] = 3
            continue
        # P begins at klo + 2, so P[:start] are exactly the primes in (klo+1, k+1]
        if not (base_pi + start + W < phi[i] and 2 * P[start + W - 1] < 3 * k):
            status[i] = 1
            continue
        for j in range(start, start + W):
            q = P[j] % k
            if isq[q]:
                wit[i] = P[j]
                break
        if wit[i] == 0:
            status[i] = 2
    return wit, status


def segmented_totient(lo, hi, base_primes):
    """phi(n) for every n in [lo, hi]."""
    n = np.arange(lo, hi + 1, dtype=np.int64)
    rem = n.copy()
    phi = n.copy()
    lim = math.isqrt(hi)
    for p in base_primes[: np.searchsorted(base_primes, lim, side="right")]:
        p = int(p)
        s = (-lo) % p
        phi[s::p] -= phi[s::p] // p
        pk = p
        while pk <= hi:
            s = (-lo) % pk
            rem[s::pk] //= p
            pk *= p
    big = rem > 1
    phi[big] -= phi[big] // rem[big]
    return phi


def _mix(k, p):
    h = (k.astype(np.uint64) * np.uint64(0x9E3779B97F4A7C15)) ^ (p.astype(np.uint64) * np.uint64(0xC2B2AE3D27D4EB4F))
    h ^= h >> np.uint64(31)
    h *= np.uint64(0xBF58476D1CE4E5B9)
    h ^= h >> np.uint64(29)
    return h


@dataclass
class BlockResult:
    lo: int
    hi: int
    even_ok: int
    odd_ok: int
    odd_total: int
    failed: list
    digest: int
    witnesses: list  # (k, p) pairs of even witnesses, only when collecting
    sampled: list  # even witnesses picked for re-verification


def scan_block(klo, khi, window=WINDOW, sample_rate=0.0, collect=False, engine=None):
    """Scan even k in [klo, khi]; returns a :class:`BlockResult`."""
    engine = engine or pe.get_engine()
    n_even = (khi - klo) // 2 + 1
    base_pi = engine.pi_exact(klo + 1)
    phi = segmented_totient(klo, khi, engine._base)[::2].copy()
    margin = 8192
    with np.errstate(over="ignore"):
        while True:
            seg_hi = khi + 2 + margin
            if seg_hi - 1 > engine.config.x_max:
                raise RangeTooLarge(f"scan block [{klo}, {khi}] needs primes beyond the sieve ceiling")
            P = engine.primes_in(klo + 2, seg_hi).primes()
            q_top = seg_hi - klo
            isq = engine.small_table if q_top <= pe.SMALL_LIMIT else pe.simple_sieve(q_top)
            wit, status = _scan_kernel(klo, n_even, P, base_pi, phi, isq, window)
            if not np.any(status == _OVERFLOW):
                break
            margin *= 2
        ks = klo + 2 * np.arange(n_even, dtype=np.int64)
        ok = status == _OK
        digest = int(np.sum(_mix(ks[ok], wit[ok]), dtype=np.uint64))
    failed = [{"k": int(ks[i]), "reason": _REASONS[int(status[i])]} for i in np.flatnonzero(~ok)]
    odd_mask = (ks % 4) == 2
    odd_total = int(np.count_nonzero(odd_mask))
    odd_ok = int(np.count_nonzero(odd_mask & ok))
    sampled = []
    if sample_rate > 0:
        rng = random.Random(klo)
        idx = np.flatnonzero(ok)
        n = sum(1 for _ in idx if rng.random() < sample_rate) if len(idx) else 0
        rng = random.Random(klo)
        chosen = sorted(rng.sample(range(len(idx)), n)) if n else []
        sampled = [(int(ks[idx[c]]), int(wit[idx[c]])) for c in chosen]
    witnesses = [(int(a), int(b)) for a, b in zip(ks[ok], wit[ok])] if collect else []
    return BlockResult(klo, khi, int(np.count_nonzero(ok)), odd_ok, odd_total, failed, digest,
                       witnesses, sampled)


def _block_worker(args):
    klo, khi, window, rate, collect = args
    return scan_block(klo, khi, window, rate, collect)


# range scan with checkpoints


@dataclass
class ScanCheckpoint:
    range_lo: int
    range_hi: int
    cursor: int
    witnesses_logged: int
    window_state: dict
    status: str  # RUNNING, COMPLETE or FAILED(k)
    state: dict = field(default_factory=dict)

    def to_record(self):
        return {"cursor": self.cursor, "range": [self.range_lo, self.range_hi],
                "status": self.status, "witnesses_logged": self.witnesses_logged,
                "window_state": self.window_state, "state": self.state}


@dataclass
class ScanReport:
    range_lo: int
    range_hi: int
    even_checked: int = 0
    even_witnesses: int = 0
    odd_checked: int = 0
    odd_witnesses: int = 0
    failed: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    sampled: int = 0
    sample_failures: list = field(default_factory=list)
    digest: int = 0
    status: str = "RUNNING"
    window: int = WINDOW

    @property
    def certified(self):
        return self.window == WINDOW

    @property
    def ok(self):
        return not self.failed and not self.sample_failures and self.status == "COMPLETE"

    def state(self):
        d = asdict(self)
        d.pop("witnesses")
        return d

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "range": [self.range_lo, self.range_hi],
            "status": self.status,
            "certified": self.certified,
            "window": self.window,
            "even_checked": self.even_checked,
            "even_witnesses": self.even_witnesses,
            "odd_checked": self.odd_checked,
            "odd_witnesses": self.odd_witnesses,
            "witnesses": [w.to_dict() if isinstance(w, Witness) else w for w in self.witnesses],
            "failed": self.failed,
            "sampled": self.sampled,
            "sample_failures": self.sample_failures,
            "digest": f"{self.digest:016x}",
        }


def _aligned_blocks(lo, hi, block):
    a = lo
    while a <= hi:
        b = min(a + block - 2, hi)
        yield a, b
        a = b + 2


class _CheckpointLog:
    """Append-only JSON-lines log; every record is flushed and fsynced."""

    def __init__(self, path):
        self.path = Path(path) if path else None
        self._fh = None

    def open(self, header, resume):
        if not self.path:
            return None
        last = None
        if resume and self.path.exists():
            last = self._read_last(header)
        self._fh = open(self.path, "a" if last else "w", encoding="utf-8")
        if not last:
            self.write(header)
        return last

    def _read_last(self, header):
        last = None
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    continue  # torn final line from an interrupted write
                if rec.get("event") == "start":
                    if rec.get("range") != header["range"] or rec.get("block") != header["block"] \
                            or rec.get("window") != header["window"]:
                        raise ValueError(f"{self.path}: checkpoint belongs to a different scan")
                elif "cursor" in rec:
                    last = rec
        return last

    def write(self, rec):
        if self._fh:
            self._fh.write(json.dumps(rec, sort_keys=True) + "\n")
            self._fh.flush()
            os.fsync(self._fh.fileno())

    def close(self):
        if self._fh:
            self._fh.close()
            self._fh = None


def scan_range(lo, hi, shards=1, checkpoint=None, verify_sample=1e-4, window=WINDOW,
               block=DEFAULT_BLOCK, stride=1, collect=False, log_witnesses=False,
               resume=True, max_blocks=None):
    """Scan every even k in [lo, hi]; odd k in [lo/2, hi/2] inherit witnesses from 2k.

    ``checkpoint`` names a JSON-lines file that records progress after every
    ``stride`` blocks; an existing file for the same scan is resumed.
    ``max_blocks`` stops early (used to simulate interruption).
    """
    lo, hi = int(lo), int(hi)
    if lo % 2 or hi % 2:
        raise ValueError("scan bounds must be even")
    if lo < SCAN_START:
        raise ValueError(f"scan_range starts at {SCAN_START}; use the direct checker below it")
    if block % 2:
        raise ValueError("block size must be even")
    report = ScanReport(lo, hi, window=window)
    header = {"event": "start", "schema": SCHEMA, "range": [lo, hi], "block": block,
              "window": window, "verify_sample": verify_sample}
    ckpt = _CheckpointLog(checkpoint)
    last = ckpt.open(header, resume)
    next_lo = lo
    if last:
        st = dict(last["state"])
        for key in ("even_checked", "even_witnesses", "odd_checked", "odd_witnesses", "failed",
                    "sampled", "sample_failures", "digest"):
            setattr(report, key, st[key])
        if last["status"] != "RUNNING":
            report.status = last["status"]
            ckpt.close()
            return report
        next_lo = last["cursor"] + 2
    blocks = [(a, b) for a, b in _aligned_blocks(lo, hi, block) if a >= next_lo]
    if max_blocks is not None:
        blocks = blocks[:max_blocks]
    tasks = [(a, b, window, verify_sample, collect or log_witnesses) for a, b in blocks]
    engine = pe.get_engine()
    if shards > 1 and len(tasks) > 1:
        import multiprocessing as mp

        ctx = mp.get_context("fork")
        pool = ctx.Pool(shards)
        results = pool.imap(_block_worker, tasks)
    else:
        pool = None
        results = map(_block_worker, tasks)
    try:
        for n, res in enumerate(results, 1):
            _absorb(report, res, window, engine, ckpt, collect, log_witnesses)
            if n % stride == 0 or n == len(tasks):
                status = "RUNNING"
                ckpt.write(ScanCheckpoint(lo, hi, res.hi, report.sampled, _window_snapshot(res.hi, window, engine),
                                          status, report.state()).to_record())
    finally:
        if pool:
            pool.close()
            pool.join()
    done = not blocks or blocks[-1][1] == hi
    if done:
        report.status = "COMPLETE" if not report.failed else f"FAILED({report.failed[0]['k']})"
        ckpt.write(ScanCheckpoint(lo, hi, hi, report.sampled, {}, report.status, report.state()).to_record())
        if report.failed:
            log.error("scan found %d k without a verified witness, first k=%d",
                      len(report.failed), report.failed[0]["k"])
    ckpt.close()
    return report


def _window_snapshot(k, window, engine):
    w = pe.PrimeWindow(k, tuple(engine.primes_after(k + 1, window)), 0)
    return {"base": w.base, "first": w.primes[0], "last": w.primes[-1]}


def _absorb(report, res, window, engine, ckpt, collect, log_witnesses):
    n_even = (res.hi - res.lo) // 2 + 1
    report.even_checked += n_even
    report.even_witnesses += res.even_ok
    report.odd_checked += res.odd_total
    report.odd_witnesses += res.odd_ok
    report.digest = (report.digest + res.digest) % (1 << 64)
    for f in res.failed:
        report.failed.append(f)
        ckpt.write({"k": f["k"], "status": "FAILED", "reason": f["reason"]})
    for k, p in res.sampled:
        even = Witness(k, p, p % k)
        checks = [even]
        if k % 4 == 2:
            checks.append(derive_odd_witness(k // 2, even))
        for wit in checks:
            report.sampled += 1
            if not verify_witness(wit, window, engine):
                report.sample_failures.append(wit.to_dict())
            ckpt.write(wit.to_dict())
    for k, p in res.witnesses:
        even = Witness(k, p, p % k)
        pair = [even]
        if k % 4 == 2:
            pair.append(derive_odd_witness(k // 2, even))
        if collect:
            report.witnesses.extend(pair)
        if log_witnesses:
            for wit in pair:
                ckpt.write(wit.to_dict())
