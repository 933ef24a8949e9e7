"""Tests for the truncated divisor-sum approximants lambda_R and LambdaBig_R.

The float range evaluators are checked against lambda_R_direct, an
independent Fraction-arithmetic oracle that evaluates the defining double
sum y_d = d mu(d) sum_{r <= R, d | r} mu^2(r)/phi(r) term by term.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

from primelab import (
    biglambda_R_range,
    build_weights,
    lambda_R_direct,
    lambda_R_range,
    lambda_R_range_exact,
    psi_R,
    script_L,
    script_L_float,
)
from primelab._backend import HAS_NUMBA
from primelab.approximants import sigma_phi_bound

SEED = 20260814
N_TRIALS = 60


def brute_script_L(R: int, k: int = 1) -> Fraction:
    """sum_{r <= R, (r,k)=1} mu^2(r)/phi(r), evaluated term by term."""
    total = Fraction(0)
    for r in range(1, R + 1):
        if math.gcd(r, k) != 1:
            continue
        if any(e > 1 for e in sympy.factorint(r).values()):
            continue
        total += Fraction(1, int(sympy.totient(r)))
    return total


class TestWeights:
    def test_y1_is_script_L(self):
        """y_1 = L_1(R): the d = 1 weight is the full Hildebrand sum."""
        for R in (1, 2, 5, 10, 37):
            w = build_weights(R, exact=True)
            assert Fraction(w.y_int[0], w.denominator) == brute_script_L(R)

    def test_weight_definition(self):
        """y_d = d mu(d) sum_{r <= R, d | r} mu^2(r)/phi(r) for every d <= R."""
        R = 24
        w = build_weights(R, exact=True)
        for idx, d in enumerate(w.d_values):
            d = int(d)
            total = Fraction(0)
            for r in range(1, R + 1):
                if r % d:
                    continue
                if any(e > 1 for e in sympy.factorint(r).values()):
                    continue
                total += Fraction(1, int(sympy.totient(r)))
            expected = d * sympy.mobius(d) * total
            assert Fraction(w.y_int[idx], w.denominator) == expected, d

    def test_floats_match_exact(self):
        rng = np.random.default_rng(SEED)
        for R in rng.integers(2, 120, size=12):
            w = build_weights(int(R), exact=True)
            exact = np.array([num / w.denominator for num in w.y_int])
            assert np.allclose(w.y_float, exact, rtol=1e-12, atol=1e-12)


class TestLambdaRange:
    def test_against_direct_oracle(self):
        """Range evaluation equals the Fraction oracle at random (n, R)."""
        rng = np.random.default_rng(SEED + 1)
        for _ in range(N_TRIALS):
            R = int(rng.integers(2, 30))
            n_hi = int(rng.integers(10, 400))
            w = build_weights(R, exact=True)
            vals = lambda_R_range(n_hi, w)
            exact = lambda_R_range_exact(n_hi, w)
            n = int(rng.integers(1, n_hi + 1))
            direct = lambda_R_direct(n, R)
            assert Fraction(exact[n], w.denominator) == direct, (n, R)
            assert abs(vals[n] - float(direct)) < 1e-9 * max(1.0, abs(float(direct)))

    def test_known_value_lambda_2_of_3(self):
        """lambda_2(3) = 2."""
        assert lambda_R_direct(3, 2) == 2

    def test_value_at_one(self):
        """lambda_R(1) = L_1(R) for every R."""
        for R in (1, 3, 10, 50):
            assert lambda_R_direct(1, R) == brute_script_L(R)

    def test_depends_only_on_squarefree_kernel(self):
        """lambda_R(n) = lambda_R(n*) since y_d vanishes off squarefree d."""
        rng = np.random.default_rng(SEED + 2)
        for _ in range(25):
            R = int(rng.integers(2, 20))
            n = int(rng.integers(2, 500))
            kernel = 1
            for p in sympy.factorint(n):
                kernel *= p
            assert lambda_R_direct(n, R) == lambda_R_direct(kernel, R), (n, R)

    def test_backends_agree(self):
        if not HAS_NUMBA:
            pytest.skip("numba unavailable")
        w = build_weights(60)
        a = lambda_R_range(5000, w, backend="numpy")
        b = lambda_R_range(5000, w, backend="numba")
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


class TestBigLambda:
    def test_equals_von_mangoldt_below_R(self):
        """For 2 <= n <= R the full Mobius sum collapses to Lambda(n)."""
        R = 50
        vals = biglambda_R_range(R, R)
        for n in range(2, R + 1):
            fac = sympy.factorint(n)
            expected = math.log(min(fac)) if len(fac) == 1 else 0.0
            assert abs(vals[n] - expected) < 1e-10, n

    def test_value_at_one(self):
        """LambdaBig_R(1) = log R (only the d = 1 term survives)."""
        for R in (2, 10, 100):
            vals = biglambda_R_range(1, R)
            assert abs(vals[1] - math.log(R)) < 1e-12

    def test_brute_force_definition(self):
        """LambdaBig_R(n) = sum_{d | n, d <= R} mu(d) log(R/d)."""
        rng = np.random.default_rng(SEED + 3)
        R = 20
        vals = biglambda_R_range(2000, R)
        for n in rng.integers(2, 2000, size=N_TRIALS):
            n = int(n)
            brute = sum(int(sympy.mobius(d)) * math.log(R / d)
                        for d in sympy.divisors(n) if d <= R)
            assert abs(vals[n] - brute) < 1e-9, n


class TestScriptL:
    def test_exact_sum(self):
        for R in (1, 4, 10, 99):
            assert script_L(R) == brute_script_L(R)

    def test_coprimality_restriction(self):
        """L_k(R) drops the terms sharing a factor with k."""
        for R, k in ((10, 2), (30, 6), (50, 15)):
            assert script_L(R, k) == brute_script_L(R, k)

    def test_float_matches_fraction(self):
        for R in (5, 64, 500):
            assert abs(script_L_float(R) - float(script_L(R))) < 1e-14

    def test_exceeds_log(self):
        """L_1(R) >= log R: the Hildebrand sum dominates the logarithm."""
        for R in (2, 10, 100, 1000):
            assert script_L_float(R) >= math.log(R)


class TestPsiR:
    def test_partial_sum(self):
        """psi_R(x) = sum_{n <= x} lambda_R(n) matches the direct oracle."""
        R = 12
        w = build_weights(R)
        direct = Fraction(0)
        for n in range(1, 301):
            direct += lambda_R_direct(n, R)
        assert abs(psi_R(300, w) - float(direct)) < 1e-8


class TestSigmaPhiBound:
    def test_brute_force(self):
        """The bound constant is (sum_{r <= R} mu^2(r) sigma(r)/phi(r))^2's root."""
        for R in (1, 10, 40):
            total = Fraction(0)
            for r in range(1, R + 1):
                if any(e > 1 for e in sympy.factorint(r).values()):
                    continue
                total += Fraction(int(sympy.divisor_sigma(r)),
                                  int(sympy.totient(r)))
            assert sigma_phi_bound(R) == total
