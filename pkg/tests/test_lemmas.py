"""Tests for the five mean-value lemmas and the sieved multiplicative
evaluator they share.

The evaluator is checked bit-for-bit against a naive per-n factorization
oracle; the lemma main terms are anchored to independent constants
(Hildebrand sum, twin constant, 3 C_3) and their scaled errors to frozen
desk-scale magnitudes.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

from primelab import (
    MonicPolyPair,
    build_tables,
    constant_C,
    lemma1,
    lemma2,
    lemma3,
    lemma4,
    lemma4_log,
    lemma5,
    multiplicative_values,
    script_L_float,
    singular_Sn,
)
from primelab._backend import HAS_NUMBA
from primelab.approximants import hildebrand_main
from primelab.lemmas import (
    CUBIC_POLY_PAIR,
    HILDEBRAND_POLY_PAIR,
    euler_P1,
    ladder_sums,
    m_of,
    mult_identity_check,
)

SEED = 20260814


def naive_mult_values(fvals: np.ndarray, x: int) -> np.ndarray:
    """v[n] = mu^2(n) prod_{p | n} fvals[p] via per-n sympy factorization."""
    out = np.zeros(x + 1)
    out[1] = 1.0
    for n in range(2, x + 1):
        fac = sympy.factorint(n)
        if any(e > 1 for e in fac.values()):
            continue
        v = 1.0
        for p in fac:
            v *= fvals[p]
        out[n] = v
    return out


class TestMultiplicativeValues:
    def test_matches_naive_oracle_exactly(self, tables_small):
        """The sieved evaluation is bit-for-bit equal to the per-n product
        (both multiply the same factors in ascending prime order)."""
        rng = np.random.default_rng(SEED)
        x = 3000
        for _ in range(5):
            fvals = np.zeros(x + 1)
            primes = [p for p in sympy.primerange(2, x + 1)]
            fvals[primes] = rng.normal(size=len(primes))
            got = multiplicative_values(fvals, x, tables=tables_small)
            expected = naive_mult_values(fvals, x)
            assert np.array_equal(got, expected)

    def test_backends_bit_identical(self, tables_small):
        if not HAS_NUMBA:
            pytest.skip("numba unavailable")
        rng = np.random.default_rng(SEED + 1)
        x = 10_000
        fvals = np.zeros(x + 1)
        for p in sympy.primerange(2, x + 1):
            fvals[p] = rng.normal()
        a = multiplicative_values(fvals, x, tables=tables_small, backend="numpy")
        b = multiplicative_values(fvals, x, tables=tables_small, backend="numba")
        assert np.array_equal(a, b)

    def test_ladder_sums_prefixes(self):
        values = np.arange(11, dtype=np.float64)
        sums = ladder_sums(values, (3, 7, 10))
        assert sums == (6.0, 28.0, 55.0)

    def test_m_of(self):
        """m(k) = prod_{p | k} (1 + 1/sqrt(p)); m(6) = 2.6927..."""
        assert m_of(1) == 1.0
        assert abs(m_of(6) - (1 + 1 / math.sqrt(2)) * (1 + 1 / math.sqrt(3))) < 1e-15
        assert abs(m_of(6) - 2.69270526) < 1e-7


class TestMonicPolyPair:
    def test_validates_monic(self):
        with pytest.raises(ValueError):
            MonicPolyPair((2,), (-1, 1))  # p1 not monic
        with pytest.raises(ValueError):
            MonicPolyPair((1,), (-1, 2))  # p2 not monic

    def test_nonvanishing_guard(self):
        """P2(p) = 0 at a small prime must be rejected."""
        bad = MonicPolyPair((1,), (-2, 1))  # P2(x) = x - 2 vanishes at p = 2
        with pytest.raises(ValueError):
            bad.ensure_nonvanishing(100)
        HILDEBRAND_POLY_PAIR.ensure_nonvanishing(100)
        CUBIC_POLY_PAIR.ensure_nonvanishing(100)


class TestLemma1:
    def test_hildebrand_lhs_is_script_L(self, tables_small):
        """With P1 = 1, P2 = x - 1, k = 1 the LHS is the Hildebrand sum."""
        rep = lemma1(HILDEBRAND_POLY_PAIR, 1, (100, 2000, 10_000), tables_small)
        for x, lhs in zip(rep.x_ladder, rep.lhs):
            assert abs(lhs - script_L_float(x)) < 1e-9, x

    def test_hildebrand_main_shared(self, tables_small):
        """The lemma's main term is bit-for-bit the dedicated Hildebrand
        main-term evaluation (same cached Euler-product parts)."""
        rep = lemma1(HILDEBRAND_POLY_PAIR, 1, (1000, 10_000), tables_small)
        for x, main in zip(rep.x_ladder, rep.main):
            assert main == hildebrand_main(float(x), 1), x

    def test_scaled_errors_bounded(self, tables_small):
        """(lhs - main) sqrt(x) / m(k) stays O(1) on the ladder."""
        for k in (1, 6, 30):
            rep = lemma1(HILDEBRAND_POLY_PAIR, k, (1000, 10_000), tables_small)
            for sc in rep.scaled_error:
                assert abs(sc) < 5.0, (k, rep.scaled_error)

    def test_cubic_pair_runs(self, tables_small):
        rep = lemma1(CUBIC_POLY_PAIR, 1, (1000, 10_000), tables_small)
        assert all(math.isfinite(v) for v in rep.lhs)
        assert all(math.isfinite(v) for v in rep.scaled_error)

    def test_coprimality_drops_terms(self, tables_small):
        """k = 6 kills every n sharing a factor with 6: lhs(k=6) < lhs(k=1)."""
        r1 = lemma1(HILDEBRAND_POLY_PAIR, 1, (10_000,), tables_small)
        r6 = lemma1(HILDEBRAND_POLY_PAIR, 6, (10_000,), tables_small)
        assert r6.lhs[0] < r1.lhs[0]


class TestLemma2:
    def test_anchors_and_sup(self, tables_small):
        """S(1) = S(2) = 1 are the extreme prefix values; sup |S| = 1."""
        rep = lemma2((1000, 10_000), tables_small)
        extras = dict(rep.extras)
        assert extras["sup_abs"] == 1.0

    def test_partial_sums_shrink(self, tables_small):
        """S(x) -> 0: |S| decreases along a decade-spaced ladder."""
        rep = lemma2((100, 1000, 10_000), tables_small)
        mags = [abs(v) for v in rep.lhs]
        assert mags[2] < mags[1] < mags[0]

    def test_weights_definition(self, tables_small):
        """S(x) = sum_{n <= x} mu^2(n) f(n), f(p) = -(p-2)/(p(p-1)), which
        auto-vanishes at p = 2; brute force at x = 200."""
        brute = 1.0  # n = 1 term
        for n in range(2, 201):
            fac = sympy.factorint(n)
            if any(e > 1 for e in fac.values()):
                continue
            term = 1.0
            for p in fac:
                term *= -(p - 2) / (p * (p - 1))
            brute += term
        rep = lemma2((200,), tables_small)
        assert abs(rep.lhs[0] - brute) < 1e-12


class TestLemma3:
    def test_exact_small_anchor(self, tables_small):
        """At x = 3 only n in {1, 2, 3} contribute; frozen exact value."""
        rep = lemma3((3,), tables_small)
        assert abs(rep.lhs[0] - 9.243490634207287) < 1e-12

    def test_euler_product_constant(self):
        """P(1) = prod_p (1 + c_p/p)(1 - 1/p)^3 with the sqrt-weighted c_p;
        frozen value at the default cut."""
        assert abs(euler_P1(10**6) - 0.7048964292158758) < 1e-12

    def test_fit_predict_next_rung(self, tables_e6):
        """The scaled sum L(x)/(sqrt(x) log^2 x) approaches P(1) like
        P1 (1 + D/log x + E/log^2 x): fitting D, E on rungs (1e4, 1e5)
        predicts the 1e6 ratio to a few parts in 1e3."""
        rep = lemma3((10**4, 10**5, 10**6), tables_e6)
        p1 = dict(rep.extras)["euler_P1"]
        ratios = [sc + p1 for sc in rep.scaled_error]
        logs = [math.log(x) for x in rep.x_ladder]
        # solve ratios[i] = p1 (1 + D/li + E/li^2) for D, E on first two rungs
        a1, a2 = (ratios[0] / p1 - 1), (ratios[1] / p1 - 1)
        l1, l2 = logs[0], logs[1]
        E = (a1 * l1 - a2 * l2) / (1 / l1 - 1 / l2)
        D = a1 * l1 - E / l1
        predicted = p1 * (1 + D / logs[2] + E / logs[2] ** 2)
        assert abs(predicted / ratios[2] - 1) < 5e-3
        # and the approach is from above, shrinking
        assert ratios[0] > ratios[1] > ratios[2] > p1 > 0


class TestLemma4:
    def test_even_main_is_twin_series(self, tables_small):
        """j = 2, k = 1: the main constant is S_2(2) = 2 C_2 up to the
        p_cut truncation of the dedicated evaluator."""
        rep = lemma4(2, 1, (10_000,), tables_small)
        main_const = dict(rep.extras)["main_constant"]
        assert abs(main_const - singular_Sn(2, 2).value) < 1e-6

    def test_vanishing_when_j_shares_k(self, tables_small):
        """gcd interplay: j = 3, k = 5 makes the main term vanish and the
        sum itself nearly zero."""
        rep = lemma4(3, 5, (10_000,), tables_small)
        assert rep.main[0] == 0.0
        assert abs(rep.lhs[0]) < 1e-4

    def test_scaled_errors_bounded(self, tables_small):
        rep = lemma4(2, 1, (1000, 10_000), tables_small)
        for sc in rep.scaled_error:
            assert abs(sc) < 1.0

    def test_log_variant_even(self, tables_e6):
        """2 | j: lhs -> S_2(j) [sum_{p not | j} log p/(p(p-2))
        - sum_{p | j} log p / p]; observed agreement ~1e-7 at x = 1e6."""
        rep = lemma4_log(2, (10**6,), tables_e6)
        assert abs(rep.lhs[0] - rep.main[0]) < 1e-6

    def test_log_variant_odd(self, tables_e6):
        """2 not | j: lhs -> S_2(2j) log 2 / 2."""
        rep = lemma4_log(1, (10**6,), tables_e6)
        assert abs(rep.lhs[0] - rep.main[0]) < 1e-6
        expected = singular_Sn(2, 2).value * math.log(2) / 2
        assert abs(rep.main[0] - expected) < 1e-12


class TestLemma5:
    def test_main_is_three_C3(self, tables_small):
        """J = 6, k = 1: the main constant equals 3 C_3."""
        rep = lemma5(6, 1, (10_000,), tables_small)
        main_const = dict(rep.extras)["main_constant"]
        assert abs(main_const - 3 * constant_C(3).value) < 1e-12

    def test_converges_at_scale(self, tables_e6):
        """lhs approaches the main constant: relative gap < 1% at x = 1e6."""
        rep = lemma5(6, 1, (10**6,), tables_e6)
        assert abs(rep.lhs[0] / rep.main[0] - 1) < 0.01

    def test_zero_unless_3_divides_J_and_k_odd(self, tables_small):
        """Main term vanishes when 2 | k or 3 not | J."""
        rep = lemma5(6, 2, (10_000,), tables_small)
        assert rep.main[0] == 0.0
        rep = lemma5(2, 1, (10_000,), tables_small)
        assert rep.main[0] == 0.0
        rep = lemma5(4, 1, (10_000,), tables_small)
        assert rep.main[0] == 0.0

    def test_preconditions(self, tables_small):
        with pytest.raises(ValueError):
            lemma5(5, 1, (1000,), tables_small)  # J odd
        with pytest.raises(ValueError):
            lemma5(6, 4, (1000,), tables_small)  # k does not divide J


class TestMultIdentity:
    def test_zero_for_multiplicative_f(self):
        """sum_{d | n} mu^2(d) f(d) log d equals its closed form: the
        discrepancy vector of log-p coefficients is identically zero."""
        rng = np.random.default_rng(SEED + 2)
        for _ in range(20):
            n = int(rng.integers(2, 2000))

            def f(p: int) -> Fraction:
                return Fraction(1, p + 1)

            assert mult_identity_check(n, f) == 0

    def test_guards(self):
        with pytest.raises(ValueError):
            mult_identity_check(0, lambda p: Fraction(1))
        with pytest.raises(ValueError):
            # 1 + f(3) = 0 makes the closed form's denominator vanish
            mult_identity_check(15, lambda p: Fraction(-1))
