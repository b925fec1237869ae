"""Arithmetic primitives: primes, primality, surjection counts, roots mod p."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import BoundsError

SIEVE_MAX = 1 << 40
U64_LIMIT = 1 << 64
ROOT_PRIME_MAX = 1 << 31
MAX_SURJECTION_K = 64

# Below this the root count is taken by evaluating f at every residue; above
# it, by deg gcd(f, X^p - X) over F_p.
BRUTE_FORCE_ROOT_LIMIT = 256

# Deterministic Miller-Rabin witnesses: the first twelve primes are a strong
# pseudoprime-free base set for all n < 3.3e24 (Sorenson and Webster, 2015,
# "Strong pseudoprimes to twelve prime bases").
MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit`` (inclusive), as a read-only int64 array."""

    limit: int
    primes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.primes.setflags(write=False)

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return (int(p) for p in self.primes)

    def __contains__(self, n):
        n = int(n)
        if n < 2 or n > self.limit:
            return False
        i = int(np.searchsorted(self.primes, n))
        return i < len(self.primes) and int(self.primes[i]) == n

    def count_upto(self, x):
        """pi(x) for x <= limit."""
        if x > self.limit:
            raise BoundsError(f"{x} exceeds table limit {self.limit}")
        return int(np.searchsorted(self.primes, x, side="right"))

    def upto(self, x):
        return self.primes[: self.count_upto(min(x, self.limit))]


def _small_primes(n):
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_p[p]:
            is_p[p * p::p] = False
    return np.flatnonzero(is_p).astype(np.int64)


def sieve_primes(limit: int, segment: int = 1 << 20) -> PrimeTable:
    """Segmented sieve of Eratosthenes: memory O(sqrt(limit) + output)."""
    if not 2 <= limit <= SIEVE_MAX:
        raise BoundsError(f"sieve limit must lie in [2, 2^40], got {limit}")
    return _sieve_cached(int(limit), int(segment))


@lru_cache(maxsize=8)
def _sieve_cached(limit, segment):
    base = _small_primes(math.isqrt(limit))
    chunks = []
    lo = 0
    while lo <= limit:
        hi = min(lo + segment, limit + 1)
        flags = kernels.sieve_segment(lo, hi, base)
        chunks.append(np.flatnonzero(flags).astype(np.int64) + lo)
        lo = hi
    return PrimeTable(limit, np.concatenate(chunks))


def primes_upto(limit):
    """Plain int64 array of primes <= limit (empty below 2)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    return sieve_primes(limit).primes


def is_prime_u64(n: int) -> bool:
    """Exact primality for 0 <= n < 2^64."""
    n = int(n)
    if not 0 <= n < U64_LIMIT:
        raise BoundsError(f"{n} is outside the unsigned 64-bit range")
    return kernels.backend.is_prime_u64(n)


def binomial(n: int, r: int) -> int:
    if not 0 <= r <= n:
        raise BoundsError(f"binomial requires 0 <= r <= n, got ({n}, {r})")
    return math.comb(n, r)


def surjections(k: int, v: int) -> int:
    """Number of surjective maps from a k-set onto a v-set.

    Computed by inclusion-exclusion, sum_i (-1)^i C(v, i) (v - i)^k.
    """
    if not 1 <= k <= MAX_SURJECTION_K or v < 1:
        raise BoundsError(f"surjections needs 1 <= k <= {MAX_SURJECTION_K} and v >= 1")
    if v > k:
        return 0
    return sum((-1) ** i * math.comb(v, i) * (v - i) ** k for i in range(v + 1))


class SurjectionTable:
    """Exact sigma(k, v) for 1 <= v <= k <= max_k, built by the recurrence
    sigma(k, v) = v * (sigma(k-1, v) + sigma(k-1, v-1))."""

    def __init__(self, max_k: int):
        if not 1 <= max_k <= MAX_SURJECTION_K:
            raise BoundsError(f"max_k must lie in [1, {MAX_SURJECTION_K}]")
        self.max_k = max_k
        rows = [[0, 1]]  # row k=1: sigma(1,0) = 0, sigma(1,1) = 1
        for k in range(2, max_k + 1):
            prev = rows[-1]
            row = [0] * (k + 1)
            for v in range(1, k + 1):
                above = prev[v] if v < len(prev) else 0
                row[v] = v * (above + prev[v - 1])
            rows.append(row)
        self._rows = rows

    def __call__(self, k, v):
        if not 1 <= k <= self.max_k or v < 1:
            raise BoundsError(f"({k}, {v}) outside table with max_k={self.max_k}")
        return self._rows[k - 1][v] if v <= k else 0

    def row(self, k):
        return tuple(self._rows[k - 1][1:])


@lru_cache(maxsize=None)
def surjection_table(max_k):
    return SurjectionTable(max_k)


def stirling2(k, v):
    """Stirling number of the second kind, sigma(k, v) / v!."""
    return surjections(k, v) // math.factorial(v)


class RootCount(int):
    """An integer root count that also records whether the polynomial
    vanished identically (every residue is then a root)."""

    saturated: bool

    def __new__(cls, value, saturated=False):
        obj = super().__new__(cls, value)
        obj.saturated = saturated
        return obj

    def __repr__(self):
        return f"RootCount({int(self)}, saturated={self.saturated})"


def _coeffs_of(f):
    return list(getattr(f, "coeffs", f))


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymod(a, g, p):
    """Remainder of a modulo monic g over F_p (lists, ascending)."""
    a = list(a)
    dg = len(g) - 1
    for i in range(len(a) - 1, dg - 1, -1):
        c = a[i] % p
        if c:
            for j in range(dg + 1):
                a[i - dg + j] = (a[i - dg + j] - c * g[j]) % p
    return _trim([x % p for x in a[:dg]])


def _polymulmod(a, b, g, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _polymod(out, g, p)


def _monic(a, p):
    inv = pow(a[-1], -1, p)
    return [x * inv % p for x in a]


def _polygcd(a, b, p):
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        b = _monic(b, p)
        a, b = b, _polymod(a, b, p)
    return _monic(a, p) if a else a


def distinct_roots_gcd(coeffs, p):
    """Distinct roots in F_p of a nonzero reduced polynomial: deg gcd(f, X^p - X)."""
    f = _trim([c % p for c in coeffs])
    d = len(f) - 1
    if d <= 0:
        return 0
    if d == 1:
        return 1
    g = _monic(f, p)
    # X^p mod g by square-and-multiply
    result = [1]
    base = _polymod([0, 1], g, p)
    e = p
    while e:
        if e & 1:
            result = _polymulmod(result, base, g, p)
        base = _polymulmod(base, base, g, p)
        e >>= 1
    xp_minus_x = list(result) + [0] * max(0, 2 - len(result))
    xp_minus_x[1] -= 1
    return len(_polygcd(g, _trim(xp_minus_x), p)) - 1


def distinct_roots_brute(coeffs, p):
    count = 0
    for x in range(p):
        acc = 0
        for c in reversed(coeffs):
            acc = (acc * x + c) % p
        count += acc == 0
    return count


def roots_mod_p_unchecked(coeffs, p):
    reduced = _trim([c % p for c in coeffs])
    if not reduced:
        return RootCount(p, saturated=True)
    if p <= BRUTE_FORCE_ROOT_LIMIT:
        return RootCount(distinct_roots_brute(reduced, p))
    return RootCount(distinct_roots_gcd(reduced, p))


def poly_roots_mod_p(f, p: int) -> RootCount:
    """Number of distinct x in Z/pZ with f(x) = 0 mod p.

    ``f`` is an :class:`~singseries.polyfam.IntPolynomial` or an ascending
    coefficient sequence. If f vanishes identically mod p the result is p
    with ``saturated=True``.
    """
    coeffs = _coeffs_of(f)
    if not any(coeffs):
        raise BoundsError("zero polynomial has no finite root count")
    if not 2 <= p <= ROOT_PRIME_MAX or not is_prime_u64(p):
        raise BoundsError(f"p must be a prime <= 2^31, got {p}")
    return roots_mod_p_unchecked(coeffs, p)


def smallest_prime_factors(n):
    """spf[i] = smallest prime factor of i for 2 <= i <= n (int32)."""
    spf = np.zeros(n + 1, dtype=np.int32)
    for p in _small_primes(math.isqrt(n)):
        p = int(p)
        block = spf[p * p::p]
        block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[:2] = 0
    return spf


def prime_factors(n):
    """Distinct prime factors of |n| >= 1 by trial division, ascending."""
    n = abs(int(n))
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


# Above this square root, prime_divisors_upto scans the primes <= limit instead.
_TRIAL_SQRT_MAX = 1 << 24


def prime_divisors_upto(n, limit):
    """Distinct primes q <= limit dividing the nonzero integer n, ascending."""
    n = abs(int(n))
    if n == 0:
        raise BoundsError("zero has every prime as a divisor")
    root = math.isqrt(n)
    if root <= _TRIAL_SQRT_MAX and n < 1 << 62:
        ps = primes_upto(max(root, 2))
        out = []
        for q in ps[(n % ps) == 0]:
            q = int(q)
            out.append(q)
            while n % q == 0:
                n //= q
        if n > 1:
            out.append(n)
        return [q for q in out if q <= limit]
    return [int(q) for q in primes_upto(limit) if n % int(q) == 0]
