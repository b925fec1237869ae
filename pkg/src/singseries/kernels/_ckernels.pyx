# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Semantics are defined by ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY
from libc.stdint cimport int32_t, int64_t, uint64_t, uint8_t

cnp.import_array()

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t[12] MR_BASES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]


cdef inline uint64_t splitmix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def sieve_segment(int64_t lo, int64_t hi, const int64_t[::1] base_primes):
    cdef int64_t n = hi - lo
    if n < 0:
        n = 0
    flags_arr = np.ones(n, dtype=np.uint8)
    cdef uint8_t[::1] flags = flags_arr
    cdef int64_t x, p, start, j, i
    cdef Py_ssize_t nb = base_primes.shape[0]
    if n == 0:
        return flags_arr
    with nogil:
        x = lo
        while x < hi and x < 2:
            flags[x - lo] = 0
            x += 1
        for i in range(nb):
            p = base_primes[i]
            if p * p >= hi:
                break
            start = ((lo + p - 1) // p) * p
            if start < p * p:
                start = p * p
            j = start - lo
            while j < n:
                flags[j] = 0
                j += p
    return flags_arr


cdef inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) noexcept nogil:
    return <uint64_t>((<u128>a * b) % m)


cdef inline uint64_t powmod(uint64_t a, uint64_t e, uint64_t m) noexcept nogil:
    cdef uint64_t r = 1
    a %= m
    while e:
        if e & 1:
            r = mulmod(r, a, m)
        a = mulmod(a, a, m)
        e >>= 1
    return r


cdef bint is_prime_c(uint64_t n) noexcept nogil:
    cdef int i, r, s
    cdef uint64_t d, x, a
    if n < 2:
        return False
    for i in range(12):
        if n % MR_BASES[i] == 0:
            return n == MR_BASES[i]
    d = n - 1
    s = 0
    while (d & 1) == 0:
        d >>= 1
        s += 1
    for i in range(12):
        a = MR_BASES[i]
        x = powmod(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for r in range(s - 1):
            x = mulmod(x, x, n)
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime_u64(n):
    return bool(is_prime_c(<uint64_t>n))


def is_prime_batch(values):
    cdef const uint64_t[::1] v = np.ascontiguousarray(values, dtype=np.uint64)
    out_arr = np.zeros(v.shape[0], dtype=bool)
    cdef uint8_t[::1] out = out_arr.view(np.uint8)
    cdef Py_ssize_t i
    with nogil:
        for i in range(v.shape[0]):
            out[i] = is_prime_c(v[i])
    return out_arr


cdef inline int distinct_residues(const int64_t* offs, int k, int64_t p,
                                  int64_t* buf) noexcept nogil:
    cdef int i, j, nu = 0
    cdef int64_t r
    for i in range(k):
        r = offs[i] % p
        if r < 0:
            r += p
        for j in range(nu):
            if buf[j] == r:
                break
        else:
            buf[nu] = r
            nu += 1
    return nu


def pattern_sweep(int k, int64_t h, int64_t start, int64_t stop,
                  const int32_t[::1] spf, const int64_t[::1] small_primes,
                  const double[:, ::1] small_local, const double[:, ::1] corr,
                  double base):
    cdef int64_t radix = 2 * h - 1
    cdef int64_t cap = stop - start if stop > start else 0
    values_arr = np.empty(cap, dtype=np.float64)
    weights_arr = np.empty(cap, dtype=np.int64)
    indices_arr = np.empty(cap, dtype=np.int64)
    cdef double[::1] values = values_arr
    cdef int64_t[::1] weights = weights_arr
    cdef int64_t[::1] indices = indices_arr
    offs_arr = np.zeros(max(k, 1), dtype=np.int64)
    buf_arr = np.zeros(max(k, 1), dtype=np.int64)
    found_arr = np.zeros(max(k * (k - 1) // 2 * 64, 1), dtype=np.int64)
    cdef int64_t[::1] offs = offs_arr
    cdef int64_t[::1] buf = buf_arr
    cdef int64_t[::1] found = found_arr
    cdef int64_t idx, rem, mn, mx, d, q, p, t
    cdef int64_t count = 0
    cdef int pos, i, j, nu, nf, a, b
    cdef bint ok
    cdef double v
    cdef Py_ssize_t nsp = small_primes.shape[0]
    with nogil:
        for idx in range(start, stop):
            rem = idx
            offs[0] = 0
            for pos in range(k - 1, 0, -1):
                offs[pos] = rem % radix - (h - 1)
                rem = rem // radix
            ok = True
            mn = 0
            mx = 0
            for i in range(k):
                if offs[i] < mn:
                    mn = offs[i]
                if offs[i] > mx:
                    mx = offs[i]
                for j in range(i):
                    if offs[i] == offs[j]:
                        ok = False
            if not ok or mx - mn >= h:
                continue
            v = base
            for a in range(nsp):
                p = small_primes[a]
                nu = distinct_residues(&offs[0], k, p, &buf[0])
                if nu == p:
                    v = 0.0
                    break
                v *= small_local[p, nu]
            if v != 0.0:
                nf = 0
                for i in range(k):
                    for j in range(i + 1, k):
                        d = offs[i] - offs[j]
                        if d < 0:
                            d = -d
                        while d > 1:
                            q = spf[d]
                            if q > k:
                                found[nf] = q
                                nf += 1
                            while d % q == 0:
                                d = d // q
                # insertion sort, then multiply once per distinct prime
                for a in range(1, nf):
                    t = found[a]
                    b = a - 1
                    while b >= 0 and found[b] > t:
                        found[b + 1] = found[b]
                        b -= 1
                    found[b + 1] = t
                for a in range(nf):
                    if a > 0 and found[a] == found[a - 1]:
                        continue
                    q = found[a]
                    v *= corr[q, distinct_residues(&offs[0], k, q, &buf[0])]
            values[count] = v
            weights[count] = h - (mx - mn)
            indices[count] = idx
            count += 1
    return values_arr[:count].copy(), weights_arr[:count].copy(), indices_arr[:count].copy()


def mc_sample(int k, seed, int64_t start, int64_t stop,
              const int64_t[::1] primes, const double[:, ::1] logtab):
    cdef uint64_t useed = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef int64_t n = stop - start if stop > start else 0
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t np_ = primes.shape[0]
    cdef int64_t s, p, rho
    cdef Py_ssize_t i
    cdef int j
    cdef uint64_t key, x
    cdef double total
    cdef bint zero
    with nogil:
        for s in range(start, stop):
            key = splitmix64(useed + GOLDEN * <uint64_t>(s + 1))
            total = 0.0
            zero = False
            for i in range(np_):
                p = primes[i]
                rho = 0
                for j in range(k):
                    x = splitmix64(key + GOLDEN * <uint64_t>(i * k + j + 1))
                    if <int64_t>((<u128>x * <uint64_t>p) >> 64) >= rho:
                        rho += 1
                if rho == p:
                    zero = True
                    break
                total += logtab[i, rho]
            out[s - start] = -INFINITY if zero else total
    return out_arr
