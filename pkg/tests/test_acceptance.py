"""Acceptance gates, one recorded line per criterion.

Tolerances are pinned below and never loosened. Gates that are analysed as
unattainable are marked strict-xfail: they run, record their measured value
and fail; an unexpected pass would turn the suite red.
"""
import itertools

import numpy as np
import pytest

from singseries.empirical import (MonteCarloConfig, empirical_composed_average, empirical_distribution,
                                  empirical_moment, ks_distance, sample_random_singular, tuple_sweep)
from singseries.moments import (hankel_positivity, local_moment_factor, local_moment_factor_exact, mu,
                                nonvanishing_probability)
from singseries.numeric import primes_upto
from singseries.patterns import poisson_fit, window_counts
from singseries.polyfam import IntPolynomial, PolyFamily, composed_is_primitive, d1_resultant
from singseries.singular import singular_series_family, singular_series_tuple

from oracles import local_moment_brute, x2p1_split_form

SEED = 12345
SHARDS = 1
TWIN_QUOTED = 1.320336593
MU2_QUOTED = 2.300

MU_TABLE = [(2, 2.300, 1e-3), (3, 6.03294, 5e-4), (4, 17.562, 5e-2), (5, 55.255, 5e-2), (6, 184.18, 2e-1)]


@pytest.mark.parametrize("k, target, tol", MU_TABLE)
def test_c1_moment_constants(criterion, k, target, tol):
    v = mu(k, 2, 10 ** 6).value
    ok = criterion(f"1.{k - 1}", f"mu_{k}(2) at P=1e6 within {tol:g} of {target}", abs(v - target) <= tol,
                   f"{v:.6f}")
    assert ok


def test_c2_first_moment_is_one(criterion):
    errs = [abs(mu(k, 1, 10 ** 6).value - 1) for k in range(1, 7)]
    assert criterion("2", "mu_k(1) = 1 within 1e-8, k = 1..6, P=1e6", max(errs) <= 1e-8,
                     f"max error {max(errs):.2e}")


def test_c3_symmetry(criterion):
    P = 10 ** 5
    vals = {(k, m): mu(k, m, P).value for k in range(1, 6) for m in range(1, 6)}
    worst = max(abs(vals[k, m] - vals[m, k]) / vals[k, m] for k, m in vals)
    assert criterion("3", "|mu_k(m) - mu_m(k)| / mu_k(m) <= 1e-9, k, m <= 5", worst <= 1e-9,
                     f"worst {worst:.1e}")


def test_c4_exact_oracle(criterion):
    worst = 0.0
    exact = True
    for p in (2, 3, 5, 7):
        for k in range(1, 5):
            for m in range(1, 4):
                brute = local_moment_brute(p, k, m)
                exact &= local_moment_factor_exact(p, k, m) == brute
                worst = max(worst, abs(local_moment_factor(p, k, m) / float(brute) - 1))
    assert criterion("4", "local factors equal exhaustive enumeration, p <= 7, k <= 4, m <= 3",
                     exact and worst <= 1e-13, f"rational equality {exact}, float rel {worst:.1e}")


@pytest.mark.xfail(strict=True, reason="quoted 1.320336593 is 1.3e-5 above the true 2*C2 = 1.3203236317")
def test_c5_twin_constant_quoted(criterion):
    v = singular_series_tuple((1, 3), 10 ** 6).value
    ok = criterion("5.1", f"S(1,3) at P=1e6 within 1e-6 of {TWIN_QUOTED}", abs(v - TWIN_QUOTED) <= 1e-6,
                   f"{v:.10f}, off by {abs(v - TWIN_QUOTED):.2e}")
    assert ok


def test_c5_germain_agrees_with_tuple(criterion):
    P = 10 ** 6
    tup = singular_series_tuple((1, 3), P).value
    fam = singular_series_family(PolyFamily.parse("x, 2x+1"), P)
    diff = abs(fam.value - tup)
    assert criterion("5.2", "S(x, 2x+1) agrees with S(1,3) within its spread", diff <= fam.spread,
                     f"diff {diff:.1e}, spread {fam.spread:.1e}")


def test_c6_quadratic_cross_formula(criterion):
    P = 10 ** 7
    fam = singular_series_family(PolyFamily.parse("x^2+1"), P)
    split = x2p1_split_form(P)
    diff = abs(fam.value - split)
    assert criterion("6", "S(x^2+1) at P=1e7 matches the split product within the spread",
                     diff <= fam.spread, f"{fam.value:.8f} vs {split:.8f}, diff {diff:.2e}, spread {fam.spread:.2e}")


def test_c7_gallagher(criterion):
    v = empirical_moment(2, 1, 2000, 10 ** 6, shards=SHARDS)
    assert criterion("7.1", "empirical mean k=2, h=2000 within 0.05 of 1", abs(v - 1) <= 0.05, f"{v:.5f}")


def test_c7_second_moment_trend(criterion):
    vals = [empirical_moment(2, 2, h, 10 ** 6, shards=SHARDS) for h in (100, 200, 500)]
    gaps = [abs(v - MU2_QUOTED) for v in vals]
    ok = gaps[0] > gaps[1] > gaps[2]
    assert criterion("7.2", "|empirical m=2 - 2.300| strictly decreasing over h = 100, 200, 500", ok,
                     ", ".join(f"{v:.4f}" for v in vals))


def test_c8_exact_rationals(criterion):
    from fractions import Fraction
    ok = nonvanishing_probability(2) == Fraction(1, 2) and nonvanishing_probability(3) == Fraction(7, 36)
    assert criterion("8.1", "nonvanishing probability 1/2 (k=2), 7/36 (k=3)", ok,
                     f"{nonvanishing_probability(2)}, {nonvanishing_probability(3)}")


@pytest.mark.parametrize("cid, k, h, tol", [("8.2", 2, 10 ** 4, 0.01), ("8.3", 3, 500, 0.02)])
def test_c8_zero_atom(criterion, cid, k, h, tol):
    d = empirical_distribution(k, h, 10 ** 5, shards=SHARDS)
    target = float(nonvanishing_probability(k))
    frac = 1 - d.zero_fraction()
    assert criterion(cid, f"nonzero fraction k={k}, h={h} within {tol} of {nonvanishing_probability(k)}",
                     abs(frac - target) <= tol, f"{frac:.5f}")


@pytest.mark.xfail(strict=True, reason="gap near the minimum of the law closes like 1/log h; see ledger")
def test_c9_limiting_distribution(criterion):
    sweep = empirical_distribution(2, 2000, 10 ** 6, shards=SHARDS)
    mc = sample_random_singular(MonteCarloConfig(2, 1000, 10 ** 5, SEED), shards=SHARDS)
    ks = ks_distance(sweep, mc)
    ok = criterion("9", f"KS(tuple sweep h=2000, random model n=1e5 seed={SEED}) <= 0.05", ks <= 0.05,
                   f"{ks:.4f}")
    assert ok


_FAMILIES = {"primes": "x", "twins": "x, x+2", "germain": "x, 2x+1"}
_WINDOWS = {}


def _window_fit(name):
    if name not in _WINDOWS:
        w = window_counts(PolyFamily.parse(_FAMILIES[name]), 10 ** 7, 2.0)
        _WINDOWS[name] = (w, poisson_fit(w))
    return _WINDOWS[name]


_TV_REASON = "finite-N variance deficit of seed counts in short windows; see ledger"


@pytest.mark.parametrize("name", [
    "primes",
    pytest.param("twins", marks=pytest.mark.xfail(strict=True, reason="log N window length inflates the "
                                                                      "twin mean by 16% at N=1e7")),
    "germain",
])
def test_c10_window_mean(criterion, name):
    w, fit = _window_fit(name)
    ok = criterion("10." + str(list(_FAMILIES).index(name) * 2 + 1),
                   f"{name}: window mean within 15% of 2 (N=1e7, lambda=2, L={w.L})",
                   abs(fit.mean - 2) <= 0.3, f"{fit.mean:.4f}")
    assert ok


@pytest.mark.parametrize("name", [pytest.param(n, marks=pytest.mark.xfail(strict=True, reason=_TV_REASON))
                                  for n in _FAMILIES])
def test_c10_window_tv(criterion, name):
    w, fit = _window_fit(name)
    ok = criterion("10." + str(list(_FAMILIES).index(name) * 2 + 2),
                   f"{name}: TV to Poisson(2) <= 0.05", fit.tv <= 0.05,
                   f"{fit.tv:.4f}, variance {fit.variance:.3f}")
    assert ok


def test_c11_degeneracy(criterion):
    quad = IntPolynomial([7, 0, 1])
    fams = [PolyFamily.parse("x, x+2"), PolyFamily([quad, quad.shift(2), quad.shift(4)])]
    agree = all((d1_resultant(F, h) == 0) == (not composed_is_primitive(F, h))
                for F in fams for h in itertools.permutations(range(1, 51), 2))
    twin = fams[0]
    per_height = [0] * 201
    for a, b in itertools.permutations(range(1, 201), 2):
        if not composed_is_primitive(twin, (a, b)):
            per_height[max(a, b)] += 1
    counts = list(itertools.accumulate(per_height))
    exact = all(counts[h] == max(0, 2 * (h - 2)) for h in range(1, 201))
    assert criterion("11", "D1 = 0 iff imprimitive (|h| <= 50); imprimitive count 2(h-2), h <= 200",
                     agree and exact, f"resultant agreement {agree}, count formula {exact}")


def test_c12_composed_trend(criterion):
    F = PolyFamily.parse("x, x+2")
    target = TWIN_QUOTED ** 2
    vals = [empirical_composed_average(F, 2, h, 10 ** 5).value for h in (50, 100, 300)]
    gaps = [abs(v - target) for v in vals]
    ok = vals[0] < vals[1] < vals[2] < target and gaps[0] > gaps[1] > gaps[2]
    assert criterion("12", "composed average (x, x+2), k=2 moves monotonically toward 1.7433", ok,
                     ", ".join(f"{v:.4f}" for v in vals))


def test_c13_local_factors_at_least_one(criterion):
    worst = min(local_moment_factor_exact(int(p), k, m)
                for p in primes_upto(10 ** 4) for k in range(1, 7) for m in range(1, k + 1))
    assert criterion("13.1", "every local moment factor >= 1 (p <= 1e4, k, m <= 6)", worst >= 1,
                     f"min {float(worst):.6f}")


def test_c13_hankel(criterion):
    reports = {(m, N): hankel_positivity(m, N, 10 ** 5) for m in (1, 2, 3) for N in (0, 1, 2, 3)}
    ok = all(reports.values())
    statuses = sorted({r.status for r in reports.values()})
    assert criterion("13.2", "Hankel positivity for m <= 3, N <= 3", ok, "/".join(statuses))


def test_c14_determinism(criterion):
    cfg = MonteCarloConfig(2, 1000, 20000, SEED)
    mc_same = np.array_equal(sample_random_singular(cfg, shards=1).values,
                             sample_random_singular(cfg, shards=3).values)
    sweeps = [tuple_sweep(3, 60, 10 ** 4, shards=s) for s in (1, 3)]
    sweep_same = all(np.array_equal(a, b) for a, b in zip(*sweeps))
    m_same = empirical_moment(2, 2, 500, 10 ** 5, shards=1) == empirical_moment(2, 2, 500, 10 ** 5, shards=4)
    w1 = window_counts(PolyFamily.parse("x, x+2"), 10 ** 6, 2.0)
    w2 = window_counts(PolyFamily.parse("x, x+2"), 10 ** 6, 2.0)
    win_same = np.array_equal(w1.histogram, w2.histogram)
    ok = mc_same and sweep_same and m_same and win_same
    assert criterion("14", f"single-shard and multi-shard runs agree bit-for-bit (seed {SEED})", ok,
                     f"mc {mc_same}, sweep {sweep_same}, moment {m_same}, windows {win_same}")
