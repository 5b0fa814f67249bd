"""Smallest-prime-factor sieve and the factorisation helpers built on it."""

from __future__ import annotations

import functools

import numpy as np

from . import cache

# sieves below this size are cheap enough not to touch the disk
_DISK_THRESHOLD = 1 << 20


def _build_spf(n: int) -> np.ndarray:
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in range(2, int(n**0.5) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    k = np.arange(n + 1)
    unset = spf == 0
    spf[unset] = k[unset]
    return spf


@functools.lru_cache(maxsize=8)
def _spf_cached(size: int) -> np.ndarray:
    if size < _DISK_THRESHOLD:
        return _build_spf(size)
    path = cache.cache_dir() / f"spf_{size}.npy"
    try:
        arr = cache.read_array(path)
        if arr.shape == (size + 1,) and arr[2] == 2:
            return arr
    except (OSError, ValueError):
        pass
    arr = _build_spf(size)
    cache.write_array(path, arr)
    return arr


def spf_table(n: int) -> np.ndarray:
    """Array ``spf`` with ``spf[k]`` the smallest prime factor of ``k`` (``spf[1] = 1``)."""
    n = max(int(n), 2)
    size = 1 << (n - 1).bit_length()  # round up so nearby requests share a table
    return _spf_cached(size)[: n + 1]


def primes_up_to(n: int) -> np.ndarray:
    spf = spf_table(n)
    k = np.arange(spf.size)
    return k[(k >= 2) & (spf == k)]


def first_primes(count: int) -> np.ndarray:
    if count <= 0:
        return np.zeros(0, dtype=np.int64)
    bound = 16
    while True:
        ps = primes_up_to(bound)
        if ps.size >= count:
            return ps[:count]
        bound *= 2


def prime_index(n: int) -> dict[int, int]:
    return {int(p): i for i, p in enumerate(primes_up_to(n))}


def divisors(k: int, spf: np.ndarray | None = None) -> list[int]:
    spf = spf_table(k) if spf is None else spf
    divs = [1]
    while k > 1:
        p = int(spf[k])
        e = 0
        while k % p == 0:
            k //= p
            e += 1
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def exponent_vectors(ns: np.ndarray, primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exponents of ``ns`` over ``primes`` plus the unfactored cofactor.

    Returns ``(exps, rest)`` with ``ns = rest * prod(primes**exps)``.
    """
    rest = np.array(ns, dtype=np.int64, copy=True)
    exps = np.zeros((rest.size, len(primes)), dtype=np.int64)
    for j, p in enumerate(primes):
        p = int(p)
        mask = rest % p == 0
        while mask.any():
            exps[mask, j] += 1
            rest[mask] //= p
            mask = rest % p == 0
    return exps, rest


def largest_prime_factor(ns: np.ndarray) -> np.ndarray:
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size == 0:
        return ns.copy()
    spf = spf_table(int(ns.max()))
    rest = ns.copy()
    out = np.ones_like(rest)
    live = rest > 1
    while live.any():
        p = spf[rest[live]]
        out[live] = np.maximum(out[live], p)
        rest[live] //= p
        live = rest > 1
    return out
