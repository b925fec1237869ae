"""Finite-h tuple averages, the random-residue Monte Carlo model, and KS distances.

Tuple sweeps run over difference patterns rather than raw tuples: the
singular series is translation invariant, and a pattern with span s has
exactly h - s translates inside [1, h]. Each pattern carries that weight,
so weighted statistics over patterns equal plain statistics over tuples.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BudgetError, ConfigurationError, DomainError
from .numeric import BRUTE_FORCE_ROOT_LIMIT, prime_divisors_upto, primes_upto, smallest_prime_factors
from .polyfam import PolyFamily, compose, nu_p_family, require_primitive, resultant, shift_relations
from .singular import (FamilyLocalData, base_constant, correction_factor, local_factor,
                       singular_series_family)
from .tuples import count_distinct, shard_ranges

DEFAULT_BUDGET = 10 ** 8

TUPLE_SWEEP = "tuple-sweep"
MONTE_CARLO = "monte-carlo"
WINDOW_COUNTS = "window-counts"


@dataclass
class EmpiricalDistribution:
    """Weighted multiset of nonnegative reals."""

    values: np.ndarray
    weights: np.ndarray
    provenance: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.weights = np.asarray(self.weights)
        if len(self.values) != len(self.weights):
            raise ConfigurationError("values and weights differ in length")
        if self.count <= 0:
            raise ConfigurationError("empty distribution")

    @property
    def count(self):
        return int(self.weights.sum()) if self.weights.dtype.kind in "iu" else float(self.weights.sum())

    def moment(self, m):
        return math.fsum(self.weights * self.values ** m) / self.count

    def mean(self):
        return self.moment(1)

    @property
    def zero_count(self):
        return self.weights[self.values == 0.0].sum()

    def zero_fraction(self):
        return float(self.zero_count) / self.count

    def _sorted(self):
        order = np.argsort(self.values, kind="stable")
        return self.values[order], np.cumsum(self.weights[order].astype(np.float64))

    def cdf(self, x):
        """P(X <= x), right-continuous."""
        v, cw = self._sorted()
        i = np.searchsorted(v, x, side="right")
        cum = np.where(i > 0, cw[np.maximum(i - 1, 0)], 0.0)
        return cum / cw[-1]

    def histogram(self, edges):
        """Counts of nonzero values per bin [lo, hi), plus the zero atom."""
        edges = np.asarray(edges, dtype=np.float64)
        nz = self.values != 0.0
        counts, _ = np.histogram(self.values[nz], bins=edges, weights=self.weights[nz])
        return counts, self.zero_count


@dataclass(frozen=True)
class MonteCarloConfig:
    k: int
    P: int
    n: int
    seed: int

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ConfigurationError("need k >= 1 and n >= 1")
        if self.P < 2 * self.k * self.k:
            raise ConfigurationError(f"P={self.P} must be >= 2k^2")
        if not 0 <= self.seed < 1 << 64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")


def _check_budget(work, budget):
    if work > budget:
        raise BudgetError(f"estimated work {work:.3g} exceeds budget {budget:.3g}")


def _run_sharded(fn, ranges, shards):
    """fn over each (start, stop) range, results in range order."""
    if shards <= 1 or len(ranges) <= 1:
        return [fn(*r) for r in ranges]
    with ProcessPoolExecutor(max_workers=shards) as pool:
        return list(pool.map(fn, *zip(*ranges)))


class _PatternTask:
    """Picklable closure evaluating one index range of the pattern sweep."""

    def __init__(self, k, h, P):
        self.k, self.h, self.P = k, h, P
        self.spf = smallest_prime_factors(max(h, 2))
        small = [int(p) for p in primes_upto(k)]
        self.small_primes = np.array(small, dtype=np.int64)
        self.small_local = np.zeros((k + 1, k + 1))
        for p in small:
            for nu in range(1, min(k, p) + 1):
                self.small_local[p, nu] = local_factor(p, nu, k)
        self.corr = np.zeros((max(h, 2), k + 1))
        for q in primes_upto(h - 1):
            q = int(q)
            if q > k:
                for nu in range(1, k + 1):
                    self.corr[q, nu] = correction_factor(q, nu, k, P)
        self.base = base_constant(k, P).value

    def __call__(self, start, stop):
        return kernels.pattern_sweep(self.k, self.h, start, stop, self.spf, self.small_primes,
                                     self.small_local, self.corr, self.base)


def pattern_count(k, h):
    return (2 * h - 1) ** (k - 1)


def decode_pattern(index, k, h):
    """Offsets (0, d_1, ..., d_{k-1}) encoded by a pattern index."""
    radix = 2 * h - 1
    offs = [0] * k
    for pos in range(k - 1, 0, -1):
        offs[pos] = index % radix - (h - 1)
        index //= radix
    return tuple(offs)


def tuple_sweep(k: int, h: int, P: int, shards: int = 1, budget: int = DEFAULT_BUDGET):
    """(values, weights, pattern indices) of S over distinct tuples in [1, h]^k."""
    if h < k:
        raise ConfigurationError(f"need h >= k, got h={h}, k={k}")
    total = pattern_count(k, h)
    _check_budget(total, budget)
    task = _PatternTask(k, h, P)
    parts = _run_sharded(task, shard_ranges(total, shards), shards)
    values = np.concatenate([p[0] for p in parts])
    weights = np.concatenate([p[1] for p in parts])
    indices = np.concatenate([p[2] for p in parts])
    if int(weights.sum()) != count_distinct(k, h):
        raise AssertionError("pattern weights do not add up to h*_k")
    return values, weights, indices


def empirical_moment(k: int, m: int, h: int, P: int, shards: int = 1,
                     budget: int = DEFAULT_BUDGET) -> float:
    """(1/h*_k) sum of S(h)^m over distinct tuples with entries <= h."""
    values, weights, _ = tuple_sweep(k, h, P, shards, budget)
    return math.fsum(weights * values ** m) / count_distinct(k, h)


def empirical_distribution(k: int, h: int, P: int, shards: int = 1,
                           budget: int = DEFAULT_BUDGET) -> EmpiricalDistribution:
    values, weights, _ = tuple_sweep(k, h, P, shards, budget)
    return EmpiricalDistribution(values, weights, TUPLE_SWEEP, {"k": k, "h": h, "P": P})


def mc_log_table(k, primes):
    """logtab[i, rho] = log of the local factor at primes[i] with rho residues hit."""
    p = primes.astype(np.float64)[:, None]
    rho = np.arange(k + 1, dtype=np.float64)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        tab = np.log1p(-rho / p) - k * np.log1p(-1.0 / p)
    tab[rho >= p] = 0.0
    return np.ascontiguousarray(tab)


class _MonteCarloTask:
    def __init__(self, cfg):
        self.cfg = cfg
        self.primes = primes_upto(cfg.P)
        self.logtab = mc_log_table(cfg.k, self.primes)

    def __call__(self, start, stop):
        logs = kernels.mc_sample(self.cfg.k, self.cfg.seed, start, stop, self.primes, self.logtab)
        return np.exp(logs)


def sample_random_singular(cfg: MonteCarloConfig, shards: int = 1,
                           budget: int = 10 ** 10) -> EmpiricalDistribution:
    """n draws of prod_{p <= P} (1 - rho_p/p)(1 - 1/p)^{-k} under uniform residues.

    Sample s draws its residues from SplitMix64 at counter
    key_s + GOLDEN * (i*k + j + 1), key_s = splitmix64(seed + GOLDEN * (s + 1)),
    for prime index i and draw j; see ``kernels._pykernels.mc_sample``.
    """
    task = _MonteCarloTask(cfg)
    _check_budget(cfg.n * len(task.primes) * cfg.k, budget)
    parts = _run_sharded(task, shard_ranges(cfg.n, shards), shards)
    values = np.concatenate(parts)
    meta = {"k": cfg.k, "P": cfg.P, "n": cfg.n, "seed": cfg.seed}
    return EmpiricalDistribution(values, np.ones(len(values), dtype=np.int64), MONTE_CARLO, meta)


def ks_distance(a: EmpiricalDistribution, b: EmpiricalDistribution) -> float:
    """Weighted two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|."""
    grid = np.union1d(a.values, b.values)
    return float(np.max(np.abs(a.cdf(grid) - b.cdf(grid))))


@dataclass(frozen=True)
class ComposedAverage:
    value: float
    h: int
    k: int
    cutoff: int
    primitive_count: int
    imprimitive_count: int
    family_value: float


def _root_set(F, p):
    x = np.arange(p, dtype=np.int64)
    hit = np.zeros(p, dtype=bool)
    for f in F.members:
        acc = np.zeros(p, dtype=np.int64)
        for c in reversed(f.coeffs):
            acc = (acc * x + c) % p
        hit |= acc == 0
    return np.flatnonzero(hit)


# Bad primes above this use the gcd root count instead of explicit root sets.
_ROOT_SET_LIMIT = 10 ** 6


class _ComposedEvaluator:
    """S(F o h) at cutoff P for many h, reusing the per-prime data of F.

    Away from primes dividing a resultant of two composed members the union
    of root sets is disjoint, so nu_p(F o h) = k * (sum of member root
    counts); only the remaining primes are evaluated individually.
    """

    def __init__(self, F, k, P):
        self.F, self.k, self.P = F, k, P
        self.data = FamilyLocalData(F, P)
        self.mtot = k * F.m
        degsum = sum(f.degree for f in F.members)
        self.small_limit = max(BRUTE_FORCE_ROOT_LIMIT, k * degsum)
        primes = self.data.primes
        big = primes > self.small_limit
        self.big_primes = primes[big]
        pf = self.big_primes.astype(np.float64)
        self.generic = np.log1p(-k * self.data.root_sum[big] / pf) - self.mtot * np.log1p(-1.0 / pf)
        self.generic_total = math.fsum(self.generic)
        self.small_primes = [int(p) for p in primes[~big]]
        self.roots = {p: _root_set(F, p) for p in self.small_primes}
        self._div_cache = {}

    def _bad_for_delta(self, delta):
        if delta not in self._div_cache:
            found = set()
            ms = self.F.members
            for a in ms:
                for b in ms:
                    if delta == 0 and a == b:
                        continue
                    r = resultant(a, b.shift(delta))
                    if r != 0:
                        found.update(q for q in prime_divisors_upto(r, self.P) if q > self.small_limit)
            self._div_cache[delta] = found
        return self._div_cache[delta]

    def _nu(self, p, offs):
        if p not in self.roots:
            if p > _ROOT_SET_LIMIT:
                lo = min(offs)
                return int(nu_p_family(compose(self.F, [o - lo + 1 for o in offs]), p))
            self.roots[p] = _root_set(self.F, p)
        r = self.roots[p]
        return len(np.unique(np.concatenate([(r - o) % p for o in offs])))

    def log_value(self, offs):
        """log S(F o offs), or None if a local factor vanishes."""
        terms = [self.generic_total]
        for p in self.small_primes:
            nu = self._nu(p, offs)
            if nu == p:
                return None
            terms.append(math.log1p(-nu / p) - self.mtot * math.log1p(-1 / p))
        bad = set(self._bad_for_delta(0))
        for i in range(len(offs)):
            for j in range(len(offs)):
                if i != j:
                    bad |= self._bad_for_delta(offs[j] - offs[i])
        for q in sorted(bad):
            nu = self._nu(q, offs)
            if nu == q:
                return None
            idx = int(np.searchsorted(self.big_primes, q))
            terms.append(math.log1p(-nu / q) - self.mtot * math.log1p(-1 / q) - self.generic[idx])
        return math.fsum(terms)


def empirical_composed_average(F: PolyFamily, k: int, h: int, P: int,
                               budget: int = DEFAULT_BUDGET) -> ComposedAverage:
    """(1/h^k) times the sum of S(F o h) over distinct tuples with F o h primitive."""
    require_primitive(F)
    if h < k:
        raise ConfigurationError(f"need h >= k, got h={h}, k={k}")
    total = pattern_count(k, h)
    _check_budget(total * len(F.members) ** 2 * k * k, budget)
    ev = _ComposedEvaluator(F, k, P)
    sf = singular_series_family(F, P, ev.data)
    if sf.exact_zero:
        raise DomainError(f"S(f) vanishes for {F}")
    forbidden = {r.delta for r in shift_relations(F)}
    sums, prim, imprim = [], 0, 0
    for idx in range(total):
        offs = decode_pattern(idx, k, h)
        if len(set(offs)) != k:
            continue
        span = max(offs) - min(offs)
        if span >= h:
            continue
        w = h - span
        if any(offs[j] - offs[i] in forbidden for i in range(k) for j in range(i + 1, k)):
            imprim += w
            continue
        prim += w
        lv = ev.log_value(offs)
        if lv is not None:
            sums.append(w * math.exp(lv))
    return ComposedAverage(math.fsum(sums) / h ** k, h, k, P, prim, imprim, sf.value)
