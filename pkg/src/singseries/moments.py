"""Moment constants mu_k(m) as Euler products of exact local averages."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BoundsError, ConfigurationError
from .numeric import primes_upto, stirling2, surjections

# Primes up to this bound get exact rational local factors inside mu();
# above it a vectorized float evaluation is used.
EXACT_PRIME_LIMIT = 1000
DIAGNOSTIC_PRIME_LIMIT = 100


@dataclass(frozen=True)
class MomentResult:
    k: int
    m: int
    cutoff: int
    value: float
    tail_log_bound: float
    local_factors: dict = field(default_factory=dict, repr=False)

    def __float__(self):
        return self.value

    def relative_error_bound(self):
        return math.expm1(self.tail_log_bound)



def local_moment_factor_exact(p: int, k: int, m: int) -> Fraction:
    """The p-factor of mu_k(m) as an exact rational (integer m >= 0).

    Sums over the number v of distinct residues: C(p, v) sigma(k, v) tuples
    mod p have exactly v distinct residues.
    """
    if k < 1 or m < 0:
        raise BoundsError("need k >= 1 and m >= 0")
    total = Fraction(0)
    for v in range(1, min(k, p) + 1):
        if v == p and m > 0:
            continue  # 0^m = 0
        count = math.comb(p, v) * surjections(k, v)
        total += Fraction(count * (p - v) ** m, p ** (k + m))
    return total * Fraction(p, p - 1) ** (k * m)


def local_moment_factor(p: int, k: int, m: float) -> float:
    """Local factor of mu_k(m). Exact for integer m; real powers otherwise."""
    if float(m).is_integer():
        return float(local_moment_factor_exact(p, k, int(m)))
    if m < 0:
        raise BoundsError("m must be nonnegative")
    total = 0.0
    for v in range(1, min(k, p) + 1):
        if v == p:
            continue
        w = stirling2(k, v) * math.exp(
            sum(math.log1p(-i / p) for i in range(v)) - (k - v) * math.log(p)
        )
        total += w * (1 - v / p) ** m
    return total * (1 - 1 / p) ** (-k * m)


def _log_factors_float(primes, k, m):
    """log of the local factors for primes > k, vectorized."""
    p = primes.astype(np.float64)
    acc = np.zeros_like(p)
    falling = np.zeros_like(p)  # log of prod_{i<v} (1 - i/p)
    for v in range(1, k + 1):
        if v > 1:
            falling = falling + np.log1p(-(v - 1) / p)
        expo = falling - (k - v) * np.log(p) + m * np.log1p(-v / p)
        acc += stirling2(k, v) * np.exp(expo)
    return np.log(acc) - k * m * np.log1p(-1.0 / p)


def moment_tail_bound(k, m, P):
    return 8.0 * k * k * m * m / (P - 1)


def mu(k: int, m: int, P: int) -> MomentResult:
    """Truncated Euler product for mu_k(m) over p <= P."""
    if k < 1 or m < 1:
        raise BoundsError("mu needs k, m >= 1")
    need = max(4 * k * k * m * m, 100)
    if P < need:
        raise ConfigurationError(f"cutoff P={P} below max(4k^2m^2, 100) = {need}")
    primes = primes_upto(P)
    exact_limit = max(EXACT_PRIME_LIMIT, k)
    logs, diag = [], {}
    for p in primes[primes <= exact_limit]:
        p = int(p)
        f = float(local_moment_factor_exact(p, k, m))
        logs.append(math.log(f))
        if p <= DIAGNOSTIC_PRIME_LIMIT:
            diag[p] = f
    logs.extend(_log_factors_float(primes[primes > exact_limit], k, m))
    value = math.exp(math.fsum(logs))
    return MomentResult(k, m, P, value, moment_tail_bound(k, m, P), diag)


def nonvanishing_probability(k: int) -> Fraction:
    """Probability that no prime p <= k sees all p residues among k uniform draws."""
    if k < 1:
        raise BoundsError("k must be >= 1")
    out = Fraction(1)
    for p in primes_upto(k):
        p = int(p)
        out *= 1 - Fraction(surjections(k, p), p ** k)
    return out


def poisson_moment(k: int, lam: float) -> float:
    if k < 1 or not lam > 0:
        raise BoundsError("need k >= 1 and lambda > 0")
    return math.fsum(lam ** r * stirling2(k, r) for r in range(1, k + 1))


def growth_lower_bound(k: int, m: int, literal: bool = False) -> float:
    """Explicit lower bound for mu_k(m) from the primes p <= m.

    Each such factor is at least P(rho_p = 1) (1 - 1/p)^{m - km}
    = p^{-(k-1)} (1 + 1/(p-1))^{(k-1)m}. With ``literal=True`` the exponent
    k(m-1) is used instead; that variant overshoots mu_k(m) for small k.
    """
    if k < 1 or m < 1:
        raise BoundsError("need k, m >= 1")
    e = k * (m - 1) if literal else (k - 1) * m
    logs = [e * math.log1p(1 / (p - 1)) - (k - 1) * math.log(p) for p in map(int, primes_upto(m))]
    return math.exp(math.fsum(logs))


@dataclass(frozen=True)
class HankelReport:
    status: str  # positive | semidefinite | fail | indeterminate
    minors: tuple
    scaled_min_eigenvalues: tuple
    tolerances: tuple

    def __bool__(self):
        return self.status in ("positive", "semidefinite")


def _leading_minors(H, rel):
    """Determinants and scaled smallest eigenvalues of the leading blocks.

    Each block is normalized to unit diagonal; entrywise relative errors of
    size rel then move its eigenvalues by at most rel * j, which is the
    returned tolerance.
    """
    minors, lams, tols = [], [], []
    for j in range(1, H.shape[0] + 1):
        sub = H[:j, :j]
        minors.append(float(np.linalg.det(sub)))
        d = np.sqrt(np.abs(np.diag(sub)))
        if np.any(d == 0):
            lams.append(float("nan"))
        else:
            lams.append(float(np.linalg.eigvalsh(sub / np.outer(d, d))[0]))
        tols.append(rel * j + 1e-12 * j)
    return minors, lams, tols


def hankel_positivity(m: int, N: int, P: int) -> HankelReport:
    """Leading-minor test on [mu_{i+j}(m)] and [mu_{i+j+1}(m)], 0 <= i, j <= N."""
    if m < 1 or not 0 <= N <= 5:
        raise BoundsError("need m >= 1 and 0 <= N <= 5")
    top = 2 * N + 1
    moments = [1.0]
    rel = 1e-12
    for k in range(1, top + 1):
        r = mu(k, m, P)
        moments.append(r.value)
        rel = max(rel, r.relative_error_bound() + 1e-12)
    H0 = np.array([[moments[i + j] for j in range(N + 1)] for i in range(N + 1)])
    H1 = np.array([[moments[i + j + 1] for j in range(N + 1)] for i in range(N + 1)])
    all_minors, all_lams, all_tols, status = [], [], [], "positive"
    for H in (H0, H1):
        minors, lams, tols = _leading_minors(H, rel)
        all_minors += minors
        all_lams += lams
        all_tols += tols
    for lam, eps in zip(all_lams, all_tols):
        if not math.isfinite(lam):
            return HankelReport("indeterminate", tuple(all_minors), tuple(all_lams), tuple(all_tols))
        if lam <= -eps:
            status = "fail"
        elif lam <= eps and status == "positive":
            status = "semidefinite"
    return HankelReport(status, tuple(all_minors), tuple(all_lams), tuple(all_tols))
