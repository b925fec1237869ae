"""Slow, independent reference implementations used only by the tests."""
import itertools
import math
from fractions import Fraction

import sympy


def is_prime_trial(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def primes_bytearray(limit):
    """Odd-only sieve on a bytearray, written independently of the package."""
    if limit < 2:
        return []
    flags = bytearray([1]) * (limit // 2 + 1)  # flags[i] <-> 2i + 1
    flags[0] = 0
    i = 1
    while (2 * i + 1) ** 2 <= limit:
        if flags[i]:
            p = 2 * i + 1
            start = p * p // 2
            flags[start::p] = bytearray(len(flags[start::p]))
        i += 1
    out = [2] + [2 * i + 1 for i in range(1, len(flags)) if flags[i] and 2 * i + 1 <= limit]
    return out


def lucas_lehmer(p):
    """2^p - 1 prime for odd prime p."""
    m = (1 << p) - 1
    s = 4
    for _ in range(p - 2):
        s = (s * s - 2) % m
    return s == 0


def surjections_brute(k, v):
    return sum(1 for f in itertools.product(range(v), repeat=k) if len(set(f)) == v)


def roots_brute(coeffs, p):
    return sum(1 for x in range(p) if sum(c * x ** i for i, c in enumerate(coeffs)) % p == 0)


def local_moment_brute(p, k, m):
    """(1 - 1/p)^{-km} p^{-k} sum over (Z/pZ)^k of (1 - rho/p)^m, exactly."""
    total = Fraction(0)
    for t in itertools.product(range(p), repeat=k):
        total += (1 - Fraction(len(set(t)), p)) ** m
    return total / p ** k * Fraction(p, p - 1) ** (k * m)


def tuple_series_exact(h, P):
    """Exact rational truncated product over p <= P and over primes dividing
    Delta(h) beyond P."""
    k = len(h)
    delta = 1
    for i in range(k):
        for j in range(i + 1, k):
            delta *= h[i] - h[j]
    ps = set(sympy.primerange(2, P + 1)) | set(sympy.primefactors(delta))
    out = Fraction(1)
    for p in sorted(ps):
        nu = len({x % p for x in h})
        out *= (1 - Fraction(nu, p)) * Fraction(p, p - 1) ** k
    return out


def x2p1_split_form(P, sign3=+1):
    """(4/pi) prod_{p = 1 (4)} (1 - 1/(p-1)^2) prod_{p = 3 (4)} (1 + sign3/(p^2-1)), p <= P."""
    logs = [math.log(4 / math.pi)]
    for p in primes_bytearray(P)[1:]:
        if p % 4 == 1:
            logs.append(math.log1p(-1 / (p - 1) ** 2))
        else:
            logs.append(math.log1p(sign3 / (p * p - 1)))
    return math.exp(math.fsum(logs))


def seeds_brute(polys, N):
    """polys: list of ascending coefficient lists."""
    count = 0
    for n in range(1, N + 1):
        vals = [sum(c * n ** i for i, c in enumerate(f)) for f in polys]
        if all(v > 1 and sympy.isprime(v) for v in vals):
            count += 1
    return count
