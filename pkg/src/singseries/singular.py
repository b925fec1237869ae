"""Singular series as truncated Euler products.

Tuple series are absolutely convergent and come with a rigorous bound on
the logarithm of the omitted tail. Family series are only conditionally
convergent in general; for those the reported spread between the partial
products at P and P/2 is a heuristic convergence estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BoundsError, ConfigurationError, DegenerateInputError, DomainError
from .numeric import BRUTE_FORCE_ROOT_LIMIT, prime_divisors_upto, primes_upto, roots_mod_p_unchecked
from .polyfam import PolyFamily, nu_p_family, require_primitive, resultant
from .tuples import KTuple, delta_primes, nu_p

RIGOROUS = "rigorous"
HEURISTIC = "heuristic"


@dataclass(frozen=True)
class EulerProductValue:
    value: float
    cutoff: int
    tail_log_bound: float
    mode: str
    exact_zero: bool = False
    spread: float | None = None  # |partial(P) - partial(P/2)|, heuristic mode only

    def __float__(self):
        return self.value

    def bounds(self):
        """Interval guaranteed (rigorous mode) to contain the full product."""
        t = self.tail_log_bound
        return self.value * math.exp(-t), self.value * math.exp(t)


@dataclass(frozen=True)
class BaseConstant:
    """prod_{k < p <= P} (1 - k/p)(1 - 1/p)^{-k}."""

    k: int
    cutoff: int
    value: float
    log_value: float
    tail_log_bound: float


def local_factor(p: int, nu: int, k: int) -> float:
    """(1 - nu/p)(1 - 1/p)^{-k}, correctly rounded from the exact rational."""
    if nu > p:
        raise DomainError(f"nu={nu} exceeds p={p}")
    if nu < 0 or k < 1:
        raise DomainError(f"invalid local data nu={nu}, k={k}")
    if nu == p:
        return 0.0
    return float(Fraction((p - nu) * p ** (k - 1), (p - 1) ** k))


def generic_factor(p, k):
    return local_factor(p, k, k)


def tuple_tail_bound(k, P):
    """Bound on |log| of prod_{p > P} of generic factors, valid for P >= 2k^2."""
    return 2.0 * k * k / (P - 1)


def _check_cutoff(k, P):
    if P < 2 * k * k:
        raise ConfigurationError(f"cutoff P={P} must be >= 2k^2 = {2 * k * k}")


def generic_log_terms(k, primes):
    p = primes.astype(np.float64)
    return np.log1p(-k / p) - k * np.log1p(-1.0 / p)


@lru_cache(maxsize=64)
def base_constant(k: int, P: int) -> BaseConstant:
    _check_cutoff(k, P)
    primes = primes_upto(P)
    terms = generic_log_terms(k, primes[primes > k])
    log_value = math.fsum(terms)
    return BaseConstant(k, P, math.exp(log_value), log_value, tuple_tail_bound(k, P))


def _tuple_entries(h):
    entries = h.entries if isinstance(h, KTuple) else tuple(h)
    if len(set(entries)) != len(entries):
        raise DegenerateInputError(f"repeated entries in {entries}")
    return entries


def correction_factor(q, nu, k, P):
    """Factor applied on top of the base constant for a prime q dividing Delta."""
    if q <= P:
        return (q - nu) / (q - k)
    return local_factor(q, nu, k)


def singular_series_tuple(h, P: int, base: BaseConstant | None = None) -> EulerProductValue:
    """S(h) truncated at P, with every prime divisor of Delta(h) included exactly.

    With ``base`` the product is assembled as the base constant times
    corrections at p <= k and at the primes dividing Delta(h); without it,
    every local factor up to P is multiplied directly.
    """
    entries = _tuple_entries(h)
    k = len(entries)
    _check_cutoff(k, P)
    tail = tuple_tail_bound(k, P)
    small = [p for p in range(2, k + 1) if all(p % d for d in range(2, math.isqrt(p) + 1))]
    for p in small:
        if nu_p(entries, p) == p:
            return EulerProductValue(0.0, P, 0.0, RIGOROUS, exact_zero=True)
    dprimes = [q for q in delta_primes(entries) if q > k]
    if base is not None:
        if (base.k, base.cutoff) != (k, P):
            raise ConfigurationError(f"base constant is for (k={base.k}, P={base.cutoff}), "
                                     f"not (k={k}, P={P})")
        v = base.value
        for p in small:
            v *= local_factor(p, nu_p(entries, p), k)
        for q in dprimes:
            v *= correction_factor(q, nu_p(entries, q), k, P)
        return EulerProductValue(v, P, tail, RIGOROUS)
    logs = []
    for p in primes_upto(P):
        p = int(p)
        logs.append(math.log(local_factor(p, nu_p(entries, p), k)))
    for q in dprimes:
        if q > P:
            logs.append(math.log(local_factor(q, nu_p(entries, q), k)))
    return EulerProductValue(math.exp(math.fsum(logs)), P, tail, RIGOROUS)


def _powmod_vec(base, exp, mod):
    """Elementwise base**exp % mod for int64 arrays with mod < 2**31."""
    result = np.ones_like(base)
    b = base % mod
    e = exp.copy()
    while np.any(e):
        odd = (e & 1).astype(bool)
        result = np.where(odd, (result * b) % mod, result)
        b = (b * b) % mod
        e >>= 1
    return result


def member_root_counts(f, primes):
    """Root counts of one polynomial modulo each prime (numpy int64)."""
    p = primes.astype(np.int64)
    out = np.zeros(len(p), dtype=np.int64)
    lead = f.leading
    special = (lead % p == 0) | (p <= BRUTE_FORCE_ROOT_LIMIT) | (p >= 1 << 31)
    if f.degree == 1:
        out[~special] = 1
    elif f.degree == 2:
        c, b, a = f.coeffs
        sel = ~special & (p != 2)
        ps = p[sel]
        disc = (b * b - 4 * a * c) % ps
        leg = _powmod_vec(disc, (ps - 1) // 2, ps)
        out[sel] = np.where(disc == 0, 1, np.where(leg == 1, 2, 0))
        special = ~sel
    else:
        special[:] = True
    for i in np.flatnonzero(special):
        out[i] = roots_mod_p_unchecked(f.coeffs, int(p[i]))
    return out


class FamilyLocalData:
    """Per-prime root data of a primitive family up to a cutoff.

    ``nu[i]`` is nu_p(F) for ``primes[i]``; it is computed exactly at small
    primes and at primes dividing a pairwise resultant, and as the sum of the
    members' root counts elsewhere (where root sets cannot collide).
    """

    def __init__(self, F: PolyFamily, P: int):
        require_primitive(F)
        self.F = F
        self.cutoff = P
        self.primes = primes_upto(P)
        counts = [member_root_counts(f, self.primes) for f in F.members]
        self.member_counts = counts
        nu = np.sum(counts, axis=0) if counts else np.zeros(len(self.primes), dtype=np.int64)
        exact = set(int(q) for q in self.primes[self.primes <= BRUTE_FORCE_ROOT_LIMIT])
        ms = F.members
        for a in range(len(ms)):
            for b in range(a + 1, len(ms)):
                r = resultant(ms[a], ms[b])
                if r == 0:
                    raise DomainError("members share a factor")
                exact.update(prime_divisors_upto(r, P))
        nu = nu.astype(np.int64)
        for q in sorted(exact):
            nu[int(np.searchsorted(self.primes, q))] = nu_p_family(F, q)
        self.nu = nu
        self.root_sum = np.sum(counts, axis=0).astype(np.int64) if counts else nu.copy()

    def log_terms(self, nu, m):
        p = self.primes.astype(np.float64)
        return np.log1p(-nu / p) - m * np.log1p(-1.0 / p)


def family_partial_products(data: FamilyLocalData):
    """(log partial(P), log partial(P/2)) or None if a factor vanishes."""
    if np.any(data.nu >= data.primes):
        return None
    terms = data.log_terms(data.nu, data.F.m)
    half = data.primes <= data.cutoff // 2
    return math.fsum(terms), math.fsum(terms[half])


def singular_series_family(F: PolyFamily, P: int, data: FamilyLocalData | None = None) -> EulerProductValue:
    """Partial product of S(f) over p <= P (heuristic convergence spread)."""
    if P < 4:
        raise BoundsError("family cutoff must be at least 4")
    data = data if data is not None and data.cutoff == P else FamilyLocalData(F, P)
    logs = family_partial_products(data)
    if logs is None:
        return EulerProductValue(0.0, P, 0.0, HEURISTIC, exact_zero=True, spread=0.0)
    full, half = logs
    value = math.exp(full)
    spread = abs(value - math.exp(half))
    return EulerProductValue(value, P, abs(full - half), HEURISTIC, spread=spread)
