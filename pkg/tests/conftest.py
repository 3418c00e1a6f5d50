import math

import numpy as np
import pytest


def naive_primes(n):
    """Trial-division prime list, independent of the package sieve."""
    out = []
    for m in range(2, n + 1):
        if all(m % p for p in out if p * p <= m):
            out.append(m)
    return out


def brute_is_p_integer(k):
    """Straight from the definition with plain Python integers."""
    phi = sum(1 for a in range(1, k + 1) if math.gcd(a, k) == 1)
    chosen, m = [], 1
    while len(chosen) < phi:
        m += 1
        if all(m % d for d in range(2, math.isqrt(m) + 1)) and k % m:
            chosen.append(m)
    return len({p % k for p in chosen}) == phi


@pytest.fixture(scope="session")
def small_primes():
    return np.array(naive_primes(200000), dtype=np.int64)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    # expose the call-phase outcome to fixtures that report on it
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep
