import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from singseries.errors import BoundsError, ConfigurationError, DegenerateInputError, DomainError
from singseries.numeric import primes_upto
from singseries.polyfam import IntPolynomial, PolyFamily, nu_p_family
from singseries.singular import (HEURISTIC, RIGOROUS, FamilyLocalData, base_constant, generic_factor,
                                 local_factor, member_root_counts, singular_series_family,
                                 singular_series_tuple, tuple_tail_bound)
from singseries.tuples import KTuple

from oracles import roots_brute, tuple_series_exact

TWIN_2C2 = float(2 * mpmath.twinprime)


class TestLocalFactor:
    def test_examples(self):
        assert local_factor(2, 1, 2) == 2.0
        assert local_factor(7, 7, 3) == 0.0
        assert local_factor(3, 2, 3) == 1.125

    @given(st.sampled_from([2, 3, 5, 11, 101, 7919]), st.integers(1, 8), st.integers(1, 8))
    def test_matches_closed_form(self, p, nu, k):
        if nu > p:
            with pytest.raises(DomainError):
                local_factor(p, nu, k)
            return
        exact = Fraction(p - nu, p) * Fraction(p, p - 1) ** k
        assert local_factor(p, nu, k) == float(exact)
        # 1 + a(p, nu) form
        a = Fraction(p ** k - nu * p ** (k - 1) - (p - 1) ** k, (p - 1) ** k)
        assert float(1 + a) == local_factor(p, nu, k)

    def test_generic_factor_below_one(self):
        for p in (5, 7, 97):
            assert generic_factor(p, 2) < 1 < local_factor(p, 1, 2)


class TestBaseConstant:
    def test_k1_is_one(self):
        assert base_constant(1, 1000).value == 1.0
        assert base_constant(1, 10 ** 5).log_value == 0.0

    def test_k2_is_twin_constant(self):
        b = base_constant(2, 10 ** 6)
        c2 = TWIN_2C2 / 2
        assert abs(math.log(b.value / c2)) <= b.tail_log_bound
        assert abs(b.value - c2) < 1e-7

    def test_cutoff_self_consistency(self):
        lo, hi = base_constant(2, 1000), base_constant(2, 10 ** 6)
        assert abs(math.log(hi.value / lo.value)) <= lo.tail_log_bound

    def test_cutoff_error(self):
        with pytest.raises(ConfigurationError):
            base_constant(4, 31)
        base_constant(4, 32)


class TestTupleSeries:
    def test_twin(self):
        s = singular_series_tuple(KTuple((1, 3)), 10 ** 6)
        assert s.mode == RIGOROUS and not s.exact_zero
        lo, hi = s.bounds()
        assert lo <= TWIN_2C2 <= hi
        assert abs(s.value - TWIN_2C2) < 1e-7

    def test_admissibility_zero(self):
        s = singular_series_tuple((1, 3, 5), 1000)
        assert s.exact_zero and s.value == 0.0
        assert singular_series_tuple((2, 4, 6), 10 ** 5).exact_zero

    def test_k1_is_one(self):
        assert singular_series_tuple((17,), 100).value == 1.0
        assert singular_series_tuple((17,), 100, base_constant(1, 100)).value == 1.0

    def test_one_seven_is_twice_twin(self):
        # nu_3((1,7)) = 1, so only the 3-factor differs: 3/2 against 3/4
        a = singular_series_tuple((1, 7), 10 ** 5).value
        b = singular_series_tuple((1, 3), 10 ** 5).value
        assert a / b == pytest.approx(2.0, rel=1e-14)

    def test_errors(self):
        with pytest.raises(DegenerateInputError):
            singular_series_tuple((3, 3), 1000)
        with pytest.raises(ConfigurationError):
            singular_series_tuple((1, 3, 7), 17)
        with pytest.raises(ConfigurationError):
            singular_series_tuple((1, 3), 1000, base=base_constant(2, 2000))

    @settings(max_examples=40)
    @given(st.lists(st.integers(1, 3000), min_size=1, max_size=4, unique=True))
    def test_fast_equals_slow(self, h):
        P = 2000
        fast = singular_series_tuple(h, P, base_constant(len(h), P)).value
        slow = singular_series_tuple(h, P).value
        assert fast == pytest.approx(slow, rel=1e-12, abs=0)

    @settings(max_examples=25)
    @given(st.lists(st.integers(1, 10 ** 4), min_size=2, max_size=4, unique=True))
    def test_exact_rational_oracle(self, h):
        P = 200
        exact = tuple_series_exact(h, P)
        got = singular_series_tuple(h, P).value
        assert got == pytest.approx(float(exact), rel=1e-13, abs=0)

    @settings(max_examples=30)
    @given(st.lists(st.integers(1, 500), min_size=1, max_size=4, unique=True))
    def test_cutoff_monotonicity_of_bound(self, h):
        k = len(h)
        P1 = 1000
        v1 = singular_series_tuple(h, P1, base_constant(k, P1)).value
        for P2 in (4000, 10 ** 5):
            v2 = singular_series_tuple(h, P2, base_constant(k, P2)).value
            assert abs(v2 - v1) <= v1 * math.expm1(tuple_tail_bound(k, P1)) + 1e-300

    def test_large_delta_primes_are_included(self):
        # 1000003 is prime and exceeds P, so it enters exactly
        h = (1, 1000004)
        s = singular_series_tuple(h, 1000)
        assert s.value == pytest.approx(float(tuple_series_exact(h, 1000)), rel=1e-13)

    @pytest.mark.parametrize("k, t", [(2, 1), (2, 29), (3, 1), (3, 12)])
    def test_shift_invariance_exhaustive(self, k, t):
        P = 500
        base = base_constant(k, P)
        for h in itertools.combinations(range(1, 51), k):
            a = singular_series_tuple(h, P, base)
            b = singular_series_tuple([e + t for e in h], P, base)
            assert a.value == b.value and a.exact_zero == b.exact_zero


class TestFamilySeries:
    def test_identity_family(self):
        s = singular_series_family(PolyFamily.parse("x"), 10 ** 4)
        assert s.value == 1.0 and s.mode == HEURISTIC and s.spread == 0.0

    def test_germain_matches_twin(self):
        P = 10 ** 5
        fam = singular_series_family(PolyFamily.parse("x, 2x+1"), P)
        tup = singular_series_tuple((1, 3), P)
        assert fam.value == pytest.approx(tup.value, rel=1e-12)
        assert fam.spread > 0

    def test_twin_family_equals_tuple(self):
        P = 10 ** 5
        fam = singular_series_family(PolyFamily.linear_tuple((1, 3)), P)
        assert fam.value == pytest.approx(singular_series_tuple((1, 3), P).value, rel=1e-12)

    def test_exact_zero(self):
        s = singular_series_family(PolyFamily.parse("x, x+1"), 1000)
        assert s.exact_zero and s.value == 0.0

    def test_errors(self):
        with pytest.raises(DomainError):
            singular_series_family(PolyFamily.parse("x, x"), 1000)
        with pytest.raises(DomainError):
            singular_series_family(PolyFamily.parse("x^2-1"), 1000)
        with pytest.raises(BoundsError):
            singular_series_family(PolyFamily.parse("x"), 3)

    @pytest.mark.parametrize("text", ["x^2+1", "x^2+x+1, x^2+7", "x, x^2+x+1", "x, x^2+2", "3x+1, x^2+3x+11",
                                      "x^3-2", "x^2+7, x^2+4x+11"])
    def test_vectorized_nu_against_scalar(self, text):
        F = PolyFamily.parse(text)
        P = 3000
        data = FamilyLocalData(F, P)
        expect = [nu_p_family(F, int(p)) for p in data.primes]
        assert data.nu.tolist() == expect
        if any(n == p for p, n in zip(data.primes.tolist(), expect)):
            assert singular_series_family(F, P, data).exact_zero
            return
        # partial product from the scalar data
        logs = [math.log1p(-n / p) - F.m * math.log1p(-1 / p) for p, n in zip(data.primes.tolist(), expect)]
        assert singular_series_family(F, P, data).value == pytest.approx(math.exp(math.fsum(logs)), rel=1e-13)

    @settings(max_examples=15)
    @given(st.integers(-40, 40), st.integers(-40, 40), st.integers(1, 5))
    def test_member_root_counts(self, c, b, a):
        f = IntPolynomial([c, b, a])
        primes = primes_upto(1500)
        got = member_root_counts(f, primes)
        for p, n in zip(primes.tolist(), got.tolist()):
            if all(x % p == 0 for x in f.coeffs):
                continue
            assert n == roots_brute(f.coeffs, p)
