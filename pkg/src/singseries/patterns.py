"""Prime seeds of polynomial families and short-window Poisson statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CapabilityError, ConfigurationError, DomainError
from .numeric import U64_LIMIT, is_prime_u64, primes_upto
from .polyfam import PolyFamily
from .singular import singular_series_family

DISJOINT = "disjoint"
SLIDING = "sliding"
BLOCK = 1 << 20


def _values(F, n):
    vals = [f(n) for f in F.members]
    for v in vals:
        if v >= U64_LIMIT:
            raise CapabilityError(f"value {v} at n={n} needs more than 64 bits")
    return vals


def is_prime_seed(F: PolyFamily, n: int) -> bool:
    return all(v > 0 and is_prime_u64(v) for v in _values(F, n))


def _max_abs_value(f, N):
    return sum(abs(c) * N ** i for i, c in enumerate(f.coeffs))


def _check_capability(F, N):
    # positive leading coefficients: values at N dominate for the ranges we sieve
    for f in F.members:
        if f(N) >= U64_LIMIT:
            raise CapabilityError(f"{f} exceeds 64 bits below N={N}")


def _linear_flags(f, lo, hi):
    """1 where a*n + b is prime, for n in [lo, hi)."""
    b, a = f.coeffs
    vlo, vhi = a * lo + b, a * (hi - 1) + b
    out = np.zeros(hi - lo, dtype=np.uint8)
    if vhi < 2:
        return out
    start = max(vlo, 0)
    seg = kernels.sieve_segment(start, vhi + 1, primes_upto(math.isqrt(vhi)))
    n0 = lo
    if vlo < 0:  # skip n with negative values
        n0 = lo + (-vlo + a - 1) // a
    idx = a * np.arange(n0, hi, dtype=np.int64) + b - start
    out[n0 - lo:] = seg[idx]
    return out


def _nonlinear_flags(f, lo, hi):
    n = np.arange(lo, hi, dtype=np.int64)
    if _max_abs_value(f, hi) < 1 << 62:
        acc = np.zeros(len(n), dtype=np.int64)
        for c in reversed(f.coeffs):
            acc = acc * n + c
        vals = acc
    else:
        return np.array([is_prime_seed(PolyFamily([f]), int(x)) for x in n], dtype=np.uint8)
    out = np.zeros(len(n), dtype=np.uint8)
    pos = vals > 1
    out[pos] = kernels.is_prime_batch(vals[pos].astype(np.uint64))
    return out


def seed_flags(F: PolyFamily, N: int) -> np.ndarray:
    """flags[n] = 1 iff n is a prime seed, for 0 <= n <= N (flags[0] = 0)."""
    if N < 1:
        raise ConfigurationError("N must be positive")
    _check_capability(F, N)
    flags = np.zeros(N + 1, dtype=np.uint8)
    for lo in range(1, N + 1, BLOCK):
        hi = min(lo + BLOCK, N + 1)
        block = np.ones(hi - lo, dtype=np.uint8)
        for f in F.members:
            fl = _linear_flags(f, lo, hi) if f.degree == 1 else _nonlinear_flags(f, lo, hi)
            block &= fl
        flags[lo:hi] = block
    return flags


def count_prime_seeds(F: PolyFamily, N: int) -> int:
    return int(seed_flags(F, N).sum())


def delta_length(F: PolyFamily, N: int, P: int) -> float:
    """peg(F) / S(F) * (log N)^m with S(F) truncated at P."""
    s = singular_series_family(F, P)
    if s.exact_zero or s.value < 1e-300:
        raise DomainError(f"S(f) vanishes for {F}")
    return F.peg / s.value * math.log(N) ** F.m


@dataclass(frozen=True)
class WindowStats:
    family: str
    N: int
    lam: float
    L: int
    histogram: np.ndarray
    mode: str
    delta: float
    cutoff: int
    seeds_in_windows: int
    covered_upto: int

    @property
    def windows(self):
        return int(self.histogram.sum())

    def moment(self, k):
        r = np.arange(len(self.histogram), dtype=np.float64)
        return math.fsum(self.histogram * r ** k) / self.windows

    @property
    def serially_correlated(self):
        return self.mode == SLIDING


def window_counts(F: PolyFamily, N: int, lam: float, mode: str = DISJOINT,
                  P: int = 10 ** 6) -> WindowStats:
    """Histogram of seed counts in windows of length round(lam * delta(N, F)).

    Disjoint windows are (iL, (i+1)L] for 0 <= i < N // L; sliding windows
    are (n, n+L] for 1 <= n <= N - L.
    """
    if not lam > 0:
        raise ConfigurationError("lambda must be positive")
    if mode not in (DISJOINT, SLIDING):
        raise ConfigurationError(f"unknown window mode {mode!r}")
    delta = delta_length(F, N, P)
    L = int(round(lam * delta))
    if L < 1 or L > N:
        raise ConfigurationError(f"window length {L} does not fit in [1, {N}]")
    flags = seed_flags(F, N)
    cum = np.cumsum(flags, dtype=np.int64)  # cum[n] = pi(n; F)
    if mode == DISJOINT:
        W = N // L
        ends = cum[L * np.arange(1, W + 1)]
        starts = cum[L * np.arange(0, W)]
        covered = W * L
    else:
        n = np.arange(1, N - L + 1)
        if len(n) == 0:
            raise ConfigurationError("no sliding windows fit")
        ends, starts = cum[n + L], cum[n]
        covered = N
    counts = ends - starts
    hist = np.bincount(counts)
    return WindowStats(str(F), N, lam, L, hist, mode, delta, P, int(counts.sum()), covered)


@dataclass(frozen=True)
class PoissonFit:
    lambda_target: float
    mean: float
    variance: float
    tv: float
    chi2: float
    dof: int


def poisson_pmf(lam, rmax):
    r = np.arange(rmax + 1)
    logs = -lam + r * math.log(lam) - np.array([math.lgamma(x + 1) for x in r])
    return np.exp(logs)


def _pooled_bins(expected_total, observed, pmf, tail):
    """Merge consecutive bins until each expects >= 5; the last is open-ended."""
    bins, cur_e, cur_o = [], 0.0, 0
    for e, o in zip(expected_total * pmf, observed):
        cur_e += e
        cur_o += o
        if cur_e >= 5:
            bins.append([cur_e, cur_o])
            cur_e, cur_o = 0.0, 0
    cur_e += expected_total * tail
    if bins and cur_e < 5:
        bins[-1][0] += cur_e
        bins[-1][1] += cur_o
    else:
        bins.append([cur_e, cur_o])
    return bins


def poisson_fit(w: WindowStats, lam: float | None = None) -> PoissonFit:
    lam = w.lam if lam is None else lam
    hist = w.histogram.astype(np.float64)
    total = hist.sum()
    if total <= 0:
        raise ConfigurationError("empty window histogram")
    emp = hist / total
    pmf = poisson_pmf(lam, len(hist) - 1)
    tail = max(0.0, 1.0 - math.fsum(pmf))
    tv = 0.5 * (math.fsum(np.abs(emp - pmf)) + tail)
    r = np.arange(len(hist), dtype=np.float64)
    mean = math.fsum(emp * r)
    var = math.fsum(emp * (r - mean) ** 2)
    bins = _pooled_bins(total, w.histogram, pmf, tail)
    chi2 = math.fsum((o - e) ** 2 / e for e, o in bins if e > 0)
    return PoissonFit(lam, mean, var, min(1.0, tv), chi2, max(len(bins) - 1, 0))
