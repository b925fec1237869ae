"""Pure-Python / numpy implementations of the hot kernels.

These are the reference semantics; ``_ckernels`` must produce the same
values. Everything here is usable without a C compiler.
"""
import math

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

# Deterministic Miller-Rabin bases; correct for every n < 3.3e24.
MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def splitmix64(z):
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def sieve_segment(lo, hi, base_primes):
    """Primality flags for the integers in ``[lo, hi)``.

    ``base_primes`` must contain every prime up to ``isqrt(hi - 1)``.
    """
    n = hi - lo
    flags = np.ones(max(n, 0), dtype=np.uint8)
    if n <= 0:
        return flags
    for x in range(lo, min(hi, 2)):
        flags[x - lo] = 0
    for p in base_primes:
        p = int(p)
        pp = p * p
        if pp >= hi:
            break
        start = max(pp, ((lo + p - 1) // p) * p)
        flags[start - lo::p] = 0
    return flags


def _strong_probable_prime(n, a):
    d = n - 1
    s = 0
    while d & 1 == 0:
        d >>= 1
        s += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime_u64(n):
    if n < 2:
        return False
    for p in MR_BASES:
        if n % p == 0:
            return n == p
    return all(_strong_probable_prime(n, a) for a in MR_BASES)


def is_prime_batch(values):
    values = np.asarray(values, dtype=np.uint64)
    return np.fromiter((is_prime_u64(int(v)) for v in values), dtype=bool,
                       count=len(values))


def _distinct_residues(entries, p):
    return len({e % p for e in entries})


def pattern_sweep(k, h, start, stop, spf, small_primes, small_local, corr, base):
    """Evaluate the singular series on difference patterns ``[start, stop)``.

    A pattern is the vector ``(d_1, ..., d_{k-1})`` of offsets of the tuple
    entries from the first one, encoded as ``k - 1`` digits in base
    ``2h - 1`` (most significant first, digit ``t`` meaning ``t - h + 1``).
    Only patterns with nonzero, pairwise distinct offsets and span below
    ``h`` are emitted; the weight of a pattern is the number of tuples in
    ``[1, h]^k`` realising it.
    """
    radix = 2 * h - 1
    values = []
    weights = []
    indices = []
    small_primes = [int(p) for p in small_primes]
    for idx in range(start, stop):
        offs = [0] * k
        rem = idx
        for pos in range(k - 1, 0, -1):
            offs[pos] = rem % radix - (h - 1)
            rem //= radix
        if len(set(offs)) != k:
            continue
        span = max(offs) - min(offs)
        if span >= h:
            continue
        v = base
        for p in small_primes:
            nu = _distinct_residues(offs, p)
            if nu == p:
                v = 0.0
                break
            v *= small_local[p, nu]
        if v != 0.0:
            found = set()
            for i in range(k):
                for j in range(i + 1, k):
                    d = abs(offs[i] - offs[j])
                    while d > 1:
                        q = int(spf[d])
                        if q > k:
                            found.add(q)
                        while d % q == 0:
                            d //= q
            for q in sorted(found):
                v *= corr[q, _distinct_residues(offs, q)]
        values.append(v)
        weights.append(h - span)
        indices.append(idx)
    return (np.array(values, dtype=np.float64),
            np.array(weights, dtype=np.int64),
            np.array(indices, dtype=np.int64))


def _mulhi_u64(x, p):
    # floor(x * p / 2**64) for uint64 x and p < 2**31, without 128-bit integers
    lo = x & np.uint64(0xFFFFFFFF)
    hi = x >> np.uint64(32)
    return (hi * p + ((lo * p) >> np.uint64(32))) >> np.uint64(32)


def _mix_array(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def mc_sample(k, seed, start, stop, primes, logtab):
    """Logarithms of samples ``start .. stop - 1`` of the random singular
    series model (``-inf`` marks an exact zero).

    For sample ``s``, prime index ``i`` and draw ``j`` the residue is
    ``mulhi(splitmix64(key_s + GOLDEN * (i * k + j + 1)), p)`` with
    ``key_s = splitmix64(seed + GOLDEN * (s + 1))``; the draw is a new
    residue iff it is ``>= rho`` (birthday process on ``rho`` occupied
    residues).
    """
    n = stop - start
    if n <= 0:
        return np.zeros(0, dtype=np.float64)
    with np.errstate(over="ignore"):
        s = np.arange(start, stop, dtype=np.uint64)
        key = _mix_array(np.uint64(seed & MASK64) + np.uint64(GOLDEN) * (s + np.uint64(1)))
        total = np.zeros(n, dtype=np.float64)
        zero = np.zeros(n, dtype=bool)
        for i, p in enumerate(primes):
            p = int(p)
            pu = np.uint64(p)
            rho = np.zeros(n, dtype=np.int64)
            for j in range(k):
                c = np.uint64((GOLDEN * (i * k + j + 1)) & MASK64)
                r = _mulhi_u64(_mix_array(key + c), pu).astype(np.int64)
                rho += r >= rho
            zero |= rho == p
            total += logtab[i, np.minimum(rho, k)]
    total[zero] = -np.inf
    return total


def mc_sample_scalar(k, seed, s, primes, logtab):
    """Single-sample version of :func:`mc_sample` using Python integers."""
    key = splitmix64(seed + GOLDEN * (s + 1))
    total = 0.0
    for i, p in enumerate(primes):
        p = int(p)
        rho = 0
        for j in range(k):
            x = splitmix64(key + GOLDEN * (i * k + j + 1))
            if (x * p) >> 64 >= rho:
                rho += 1
        if rho == p:
            return -math.inf
        total += logtab[i, rho]
    return total
