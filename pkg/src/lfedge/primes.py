"""Prime and prime-power enumeration.

A segmented sieve of Eratosthenes over numpy boolean blocks.  Everything
downstream that sums over ``n = p^k <= x`` goes through
:func:`prime_powers_upto`, so the ordering of terms (and therefore floating
point reductions) is fixed.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

SEGMENT = 1 << 18


def simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def segmented_primes(limit: int, segment: int = SEGMENT) -> np.ndarray:
    """All primes ``<= limit`` using blocks of ``segment`` integers."""
    limit = int(limit)
    if limit < 2:
        return np.array([], dtype=np.int64)
    root = math.isqrt(limit)
    base = simple_sieve(root)
    if limit <= segment:
        return simple_sieve(limit)
    chunks = [base]
    low = root + 1
    while low <= limit:
        high = min(low + segment, limit + 1)
        mask = np.ones(high - low, dtype=bool)
        for p in base:
            p = int(p)
            start = max(p * p, -(-low // p) * p)
            if start >= high:
                continue
            mask[start - low :: p] = False
        chunks.append(np.flatnonzero(mask).astype(np.int64) + low)
        low = high
    return np.concatenate(chunks)


@lru_cache(maxsize=16)
def _primes_cached(limit: int) -> np.ndarray:
    out = segmented_primes(limit)
    out.setflags(write=False)
    return out


def primes_upto(limit: float) -> np.ndarray:
    """Read-only sorted array of primes ``<= limit`` (cached)."""
    return _primes_cached(int(math.floor(limit)))


@lru_cache(maxsize=32)
def _prime_powers_cached(limit: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    primes = _primes_cached(limit)
    ns, ps, ks = [], [], []
    k = 1
    while True:
        sel = primes[primes.astype(float) ** k <= limit]
        sel = sel[sel**k <= limit]
        if sel.size == 0:
            break
        ns.append(sel**k)
        ps.append(sel)
        ks.append(np.full(sel.size, k, dtype=np.int64))
        k += 1
    if not ns:
        empty = np.array([], dtype=np.int64)
        return empty, empty, empty
    n = np.concatenate(ns)
    p = np.concatenate(ps)
    kk = np.concatenate(ks)
    order = np.argsort(n, kind="stable")
    out = (n[order], p[order], kk[order])
    for arr in out:
        arr.setflags(write=False)
    return out


def prime_powers_upto(limit: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Arrays ``(n, p, k)`` with ``n = p**k <= limit``, sorted by ``n``."""
    return _prime_powers_cached(int(math.floor(limit)))


def smallest_prime_factor(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in simple_sieve(math.isqrt(limit)):
        p = int(p)
        block = spf[p * p :: p]
        block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    return spf


def factorize(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization, fine for moduli and small test values."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == [(n, 1)]


def is_prime_power(n: int) -> bool:
    return n >= 2 and len(factorize(n)) == 1


def euler_phi(n: int) -> int:
    out = n
    for p, _ in factorize(n):
        out = out // p * (p - 1)
    return out
