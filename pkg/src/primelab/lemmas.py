"""Finite-sum verification of the five auxiliary multiplicative-sum lemmas.

Every left-hand side here is a sum over squarefree n <= x of a product of
per-prime factors,

    LHS(x) = sum_{n<=x} mu^2(n) prod_{p|n} f(p)        (Moebius signs are
                                                         folded into f),

so a single sieved evaluator (``multiplicative_values``) serves all five:
it fills v[n] = mu^2(n) prod_{p|n} f(p) for n <= x from an array of
per-prime factor values, with excluded primes (p | k) encoded as f(p) = 0.
Each lemma then supplies its factor array, its closed-form main term
(Euler products and prime log-sums truncated at a recorded p_cut), and the
normalization under which the error is expected to stay bounded:

  1.  sum_{(n,k)=1} mu^2(n) prod P1(p)/P2(p)
        = K1 * K_k * (log x + gamma + S1 + S_k) + O(m(k)/sqrt(x)),
      for monic integer P1, P2 with deg P2 = 1 + deg P1;
  2.  S(x) = sum mu(n) phi_2(n) / (n phi(n)) stays bounded;
  3.  sum mu^2(n) prod (3p-4)/((p-1)(sqrt p - 1))
        = P(1) sqrt(x) log^2 x + lower order,  P(1) = ``euler_P1``;
  4.  sum_{(n,k)=1} mu(n) mu.phi((n,j)) / phi^2(n) -> a closed constant
      built from C_2, with error O(d(j')j'/(x phi(j'))), j' = j*/(j*,k);
      plus the log-weighted variant whose limit involves S_2;
  5.  the twisted divisor-weight sum over even J with k | J -> an exact
      Euler product, error O(x^{-1+eps}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from . import constants
from ._backend import njit, resolve_backend
from .constants import CONST_P_CUT, DEFAULT_P_CUT, EULER_GAMMA, primes_up_to
from .singular import constant_C, singular_Sn
from .tables import ArithTables

__all__ = [
    "MonicPolyPair",
    "LemmaReport",
    "HILDEBRAND_POLY_PAIR",
    "CUBIC_POLY_PAIR",
    "m_of",
    "multiplicative_values",
    "ladder_sums",
    "lemma1",
    "lemma2",
    "lemma3",
    "euler_P1",
    "lemma4",
    "lemma4_log",
    "lemma5",
    "mult_identity_check",
]


# --------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class MonicPolyPair:
    """Monic integer polynomial pair (P1, P2) with deg P2 = 1 + deg P1.

    Coefficients are ascending-degree tuples; P2(p) != 0 and
    (P1 + P2)(p) != 0 are checked for all primes up to ``limit`` on demand
    (these appear as denominators in the main-term constants).
    """

    p1: tuple[int, ...]
    p2: tuple[int, ...]

    def __post_init__(self) -> None:
        for name, c in (("P1", self.p1), ("P2", self.p2)):
            if not c or c[-1] != 1:
                raise ValueError(f"{name} must be monic with integer coefficients")
            if not all(isinstance(v, int) for v in c):
                raise ValueError(f"{name} coefficients must be integers")
        if len(self.p2) != len(self.p1) + 1:
            raise ValueError(
                f"deg P2 must be 1 + deg P1, got {len(self.p2) - 1} and {len(self.p1) - 1}"
            )

    def ensure_nonvanishing(self, limit: int) -> None:
        """Raise ValueError if P2 or P1+P2 vanishes at a prime <= limit."""
        constants.check_nonvanishing(self.p1, self.p2, limit)


#: (P1, P2) = (1, X-1): the summand is mu^2(n)/phi(n).
HILDEBRAND_POLY_PAIR = MonicPolyPair((1,), (-1, 1))

#: (P1, P2) = (X^2 - X - 1, (X-1)^3): the second closed-form special case.
CUBIC_POLY_PAIR = MonicPolyPair((-1, -1, 1), (-1, 3, -3, 1))


@dataclass(frozen=True)
class LemmaReport:
    """Ladder evaluation of one lemma.

    ``lhs[i]`` is the finite sum at ``x_ladder[i]``, ``main[i]`` the
    closed-form main term there, and ``scaled_error[i]`` the difference
    under the lemma's stated normalization (the quantity that should stay
    bounded, or tend to zero, as x climbs).  ``params`` echoes the inputs
    and ``extras`` carries named constants (truncated Euler products,
    running sups, ...) for the reader.
    """

    which: int
    x_ladder: tuple[int, ...]
    lhs: tuple[float, ...]
    main: tuple[float, ...]
    scaled_error: tuple[float, ...]
    params: tuple[tuple[str, str], ...] = ()
    extras: tuple[tuple[str, float], ...] = ()

    def __post_init__(self) -> None:
        if not self.x_ladder:
            raise ValueError("x_ladder must be nonempty")
        if any(b <= a for a, b in zip(self.x_ladder, self.x_ladder[1:])):
            raise ValueError(f"x_ladder must be strictly increasing: {self.x_ladder}")
        if not all(map(math.isfinite, self.scaled_error)):
            raise ValueError(f"scaled_error must be finite: {self.scaled_error}")


def _check_ladder(x_ladder: Sequence[int], tables: ArithTables) -> tuple[int, ...]:
    ladder = tuple(int(x) for x in x_ladder)
    if not ladder or any(x < 1 for x in ladder):
        raise ValueError(f"x_ladder must contain integers >= 1: {x_ladder}")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError(f"x_ladder must be strictly increasing: {x_ladder}")
    if ladder[-1] > tables.n_max:
        raise ValueError(f"x_max={ladder[-1]} exceeds tables n_max={tables.n_max}")
    return ladder


# --------------------------------------------------------------------------
# shared sieved evaluator


@njit(cache=True)
def _mult_walk_kernel(spf: np.ndarray, fvals: np.ndarray, x: int, out: np.ndarray):
    out[0] = 0.0
    if x >= 1:
        out[1] = 1.0
    for n in range(2, x + 1):
        m = n
        prod = 1.0
        ok = True
        while m > 1:
            p = spf[m]
            m //= p
            if m % p == 0:  # square factor
                ok = False
                break
            prod *= fvals[p]
        out[n] = prod if ok else 0.0


def _mult_values_numpy(fvals: np.ndarray, x: int) -> np.ndarray:
    out = np.ones(x + 1, dtype=np.float64)
    out[0] = 0.0
    ps = primes_up_to(x)
    for p in ps.tolist():
        out[p::p] *= fvals[p]
    for p in ps.tolist():
        if p * p > x:
            break
        out[p * p :: p * p] = 0.0
    return out


def multiplicative_values(
    fvals: np.ndarray,
    x: int,
    tables: ArithTables | None = None,
    backend: str | None = None,
) -> np.ndarray:
    """v[n] = mu^2(n) * prod_{p|n} fvals[p] for 0 <= n <= x (v[0]=0, v[1]=1).

    ``fvals`` is indexed by prime; entries at excluded primes should be 0.
    Factors are multiplied in ascending-prime order on both backends, so
    the two produce bit-identical arrays.  The compiled path walks smallest
    prime factors, so it needs ``tables``; without them the slice-sieve
    fallback is used regardless of backend.
    """
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    if fvals.shape[0] < x + 1:
        raise ValueError(f"fvals must cover indices up to {x}")
    if tables is None:
        return _mult_values_numpy(fvals, x)
    if tables.n_max < x:
        raise ValueError(f"tables n_max={tables.n_max} < x={x}")
    if resolve_backend(backend) == "numba":
        out = np.empty(x + 1, dtype=np.float64)
        _mult_walk_kernel(tables.spf, fvals, x, out)
        return out
    return _mult_values_numpy(fvals, x)


def ladder_sums(
    values: np.ndarray,
    x_ladder: Sequence[int],
    weight: np.ndarray | None = None,
) -> tuple[float, ...]:
    """(sum_{n<=x} values[n] * weight[n]) for each ladder rung."""
    out = []
    for x in x_ladder:
        seg = values[: x + 1]
        if weight is not None:
            out.append(float(np.dot(seg, weight[: x + 1])))
        else:
            out.append(float(np.sum(seg)))
    return tuple(out)


def _distinct_primes(k: int) -> tuple[int, ...]:
    """Ascending distinct prime divisors of |k| by trial division."""
    k = abs(k)
    out = []
    d = 2
    while d * d <= k:
        if k % d == 0:
            out.append(d)
            while k % d == 0:
                k //= d
        d += 1 if d == 2 else 2
    if k > 1:
        out.append(k)
    return tuple(out)


def m_of(k: int) -> float:
    """m(k) = sum_{d|k} mu^2(d)/sqrt(d) = prod_{p | k} (1 + 1/sqrt(p)), k != 0."""
    if k == 0:
        raise ValueError("m(k) requires k != 0")
    out = 1.0
    for p in _distinct_primes(k):
        out *= 1.0 + 1.0 / math.sqrt(p)
    return out


# --------------------------------------------------------------------------
# Lemma 1: generalized Hildebrand sums


def lemma1(
    pair: MonicPolyPair,
    k: int,
    x_ladder: Sequence[int],
    tables: ArithTables,
    *,
    p_cut: int = CONST_P_CUT,
    backend: str | None = None,
) -> LemmaReport:
    """sum_{n<=x, (n,k)=1} mu^2(n) prod_{p|n} P1(p)/P2(p) against its main term

        K1 * K_k * (log x + gamma + S1 + S_k),

    where K1, S1 are the pair's global Euler product and prime log-sum
    (truncated at p_cut) and K_k, S_k the finite corrections over p | k.
    The scaled error (lhs - main) * sqrt(x) / m(k) should stay bounded.
    """
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    ladder = _check_ladder(x_ladder, tables)
    x_max = ladder[-1]
    pair.ensure_nonvanishing(x_max)

    ps = primes_up_to(x_max).astype(np.float64)
    v1 = constants.poly_eval_array(pair.p1, ps)
    v2 = constants.poly_eval_array(pair.p2, ps)
    fv = np.zeros(x_max + 1, dtype=np.float64)
    fv[ps.astype(np.int64)] = v1 / v2
    for p in _distinct_primes(k):
        if p <= x_max:
            fv[p] = 0.0

    vals = multiplicative_values(fv, x_max, tables, backend)
    lhs = ladder_sums(vals, ladder)

    k1, s1 = constants.poly_pair_parts(pair.p1, pair.p2, p_cut)
    k2, s2 = constants.poly_pair_k_parts(pair.p1, pair.p2, _distinct_primes(k))
    main = tuple(k1 * k2 * (math.log(x) + EULER_GAMMA + s1 + s2) for x in ladder)

    mk = m_of(k)
    scaled = tuple(
        (l - m) * math.sqrt(x) / mk for l, m, x in zip(lhs, main, ladder)
    )
    return LemmaReport(
        which=1,
        x_ladder=ladder,
        lhs=lhs,
        main=main,
        scaled_error=scaled,
        params=(
            ("P1", repr(pair.p1)),
            ("P2", repr(pair.p2)),
            ("k", str(k)),
            ("p_cut", str(p_cut)),
        ),
        extras=(("K1", k1), ("K_k", k2), ("S1", s1), ("S_k", s2), ("m_k", mk)),
    )


# --------------------------------------------------------------------------
# Lemma 2: bounded Moebius average


def lemma2(
    x_ladder: Sequence[int],
    tables: ArithTables,
    *,
    backend: str | None = None,
) -> LemmaReport:
    """Partial sums S(x) = sum_{n<=x} mu(n) phi_2(n) / (n phi(n)).

    The statement is |S(x)| <= C for all x, so main = 0 and the scaled
    error is S(x) itself.  Extras carry sup_{t <= x_max} |S(t)| over every
    integer prefix and the successive ladder differences |S(x_{i+1})-S(x_i)|,
    which should shrink (the series converges).
    """
    ladder = _check_ladder(x_ladder, tables)
    x_max = ladder[-1]
    ps = primes_up_to(x_max)
    psf = ps.astype(np.float64)
    fv = np.zeros(x_max + 1, dtype=np.float64)
    # mu(n) folded in: f(p) = -(p-2)/(p(p-1)); the p=2 factor is 0 since
    # phi_2(2) = 0, which the formula produces on its own.
    fv[ps] = -(psf - 2.0) / (psf * (psf - 1.0))
    vals = multiplicative_values(fv, x_max, tables, backend)
    lhs = ladder_sums(vals, ladder)
    running = np.cumsum(vals)
    sup_abs = float(np.max(np.abs(running[1:])))
    extras = [("sup_abs", sup_abs)]
    for i, (a, b) in enumerate(zip(lhs, lhs[1:])):
        extras.append((f"cauchy_{i}", abs(b - a)))
    return LemmaReport(
        which=2,
        x_ladder=ladder,
        lhs=lhs,
        main=tuple(0.0 for _ in ladder),
        scaled_error=lhs,
        extras=tuple(extras),
    )


# --------------------------------------------------------------------------
# Lemma 3: the sqrt(x) log^2 x sum and its leading constant


def euler_P1(p_cut: int = DEFAULT_P_CUT) -> float:
    """P(1) = prod_p (1 + c_p/p) (1 - 1/p)^3, c_p = (3p-4) sqrt(p) / ((p-1)(sqrt(p)-1)).

    The factors are 1 + 3 p^{-3/2} + O(p^-2), so the truncation tail is
    about sum_{p > p_cut} 3 p^{-3/2} ~ 6 / (sqrt(p_cut) log p_cut).
    """
    ps = primes_up_to(p_cut).astype(np.float64)
    rt = np.sqrt(ps)
    c = (3.0 * ps - 4.0) * rt / ((ps - 1.0) * (rt - 1.0))
    bracket = (1.0 + c / ps) * (1.0 - 1.0 / ps) ** 3
    return float(np.exp(np.sum(np.log(bracket))))


def lemma3(
    x_ladder: Sequence[int],
    tables: ArithTables,
    *,
    p_cut: int = DEFAULT_P_CUT,
    backend: str | None = None,
) -> LemmaReport:
    """sum_{n<=x} mu^2(n) prod_{p|n} (3p-4)/((p-1)(sqrt(p)-1)).

    main = P(1) sqrt(x) log^2 x; the scaled error is
    lhs/(sqrt(x) log^2 x) - P(1), which decays only like 1/log x (the
    dropped lower-order terms are D sqrt(x) log x + E sqrt(x) with
    constants the closed form does not provide).
    """
    ladder = _check_ladder(x_ladder, tables)
    if ladder[0] < 2:
        raise ValueError("lemma3 normalization needs x >= 2 (log^2 x > 0)")
    x_max = ladder[-1]
    ps = primes_up_to(x_max)
    psf = ps.astype(np.float64)
    rt = np.sqrt(psf)
    fv = np.zeros(x_max + 1, dtype=np.float64)
    fv[ps] = (3.0 * psf - 4.0) / ((psf - 1.0) * (rt - 1.0))
    vals = multiplicative_values(fv, x_max, tables, backend)
    lhs = ladder_sums(vals, ladder)
    p1 = euler_P1(p_cut)
    main = tuple(p1 * math.sqrt(x) * math.log(x) ** 2 for x in ladder)
    scaled = tuple(
        l / (math.sqrt(x) * math.log(x) ** 2) - p1 for l, x in zip(lhs, ladder)
    )
    return LemmaReport(
        which=3,
        x_ladder=ladder,
        lhs=lhs,
        main=main,
        scaled_error=scaled,
        params=(("p_cut", str(p_cut)),),
        extras=(("euler_P1", p1),),
    )


# --------------------------------------------------------------------------
# Lemma 4: the C_2-limit sums and the log-weighted variant


def _squarefree_kernel_int(j: int) -> int:
    """j* = product of the distinct primes of |j| (largest squarefree divisor)."""
    out = 1
    for p in _distinct_primes(j):
        out *= p
    return out


def _lemma4_fvals(j: int, k: int, x_max: int) -> np.ndarray:
    """Per-prime factors of mu(n) mu.phi((n,j)) / phi^2(n) with (n,k)=1:

    p | k -> 0 (excluded);  p | j -> +1/(p-1);  else -> -1/(p-1)^2.
    """
    ps = primes_up_to(x_max)
    psf = ps.astype(np.float64)
    fv = np.zeros(x_max + 1, dtype=np.float64)
    fv[ps] = -1.0 / (psf - 1.0) ** 2
    for p in _distinct_primes(j):
        if p <= x_max:
            fv[p] = 1.0 / (p - 1.0)
    for p in _distinct_primes(k):
        if p <= x_max:
            fv[p] = 0.0
    return fv


def _lemma4_main(j: int, k: int, p_cut: int) -> float:
    """{1 - [2 not| k] mu((2,j))} C_2 prod_{p|k, p>2} (p-1)^2/(p(p-2))
    prod_{p|j, p not| k, p>2} (p-1)/(p-2)."""
    jp = _distinct_primes(j)
    kp = _distinct_primes(k)
    mu_2j = -1 if 2 in jp else 1  # mu((2, j))
    brace = 1.0 - (0.0 if 2 in kp else float(mu_2j))
    c2 = constant_C(2, p_cut).value
    corr = Fraction(1)
    for p in kp:
        if p > 2:
            corr *= Fraction((p - 1) ** 2, p * (p - 2))
    for p in jp:
        if p > 2 and p not in kp:
            corr *= Fraction(p - 1, p - 2)
    return brace * c2 * float(corr)


def lemma4(
    j: int,
    k: int,
    x_ladder: Sequence[int],
    tables: ArithTables,
    *,
    p_cut: int = CONST_P_CUT,
    backend: str | None = None,
) -> LemmaReport:
    """sum_{n<=x, (n,k)=1} mu(n) mu.phi((n,j)) / phi^2(n) -> closed constant.

    The error is O(d(j') j' / (x phi(j'))) with j' = j*/(j*, k), so the
    scaled error (lhs - main) * x * phi(j') / (j' d(j')) should stay
    bounded along the ladder.
    """
    if j == 0:
        raise ValueError("j must be nonzero")
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    ladder = _check_ladder(x_ladder, tables)
    x_max = ladder[-1]
    vals = multiplicative_values(_lemma4_fvals(j, k, x_max), x_max, tables, backend)
    lhs = ladder_sums(vals, ladder)
    main_c = _lemma4_main(j, k, p_cut)
    main = tuple(main_c for _ in ladder)

    j_star = _squarefree_kernel_int(j)
    j_prime = j_star // math.gcd(j_star, k)
    jp_primes = _distinct_primes(j_prime)
    d_jp = 2 ** len(jp_primes)
    phi_jp = 1
    for p in jp_primes:
        phi_jp *= p - 1
    scaled = tuple(
        (l - main_c) * x * phi_jp / (j_prime * d_jp) for l, x in zip(lhs, ladder)
    )
    return LemmaReport(
        which=4,
        x_ladder=ladder,
        lhs=lhs,
        main=main,
        scaled_error=scaled,
        params=(("j", str(j)), ("k", str(k)), ("p_cut", str(p_cut))),
        extras=(("main_constant", main_c), ("j_prime", float(j_prime))),
    )


def _sum_logp_p_pminus2(p_cut: int) -> float:
    """sum over odd primes p <= p_cut of log p / (p (p-2)); tail O(log p_cut / p_cut)."""
    ps = primes_up_to(p_cut).astype(np.float64)[1:]  # drop p = 2
    return float(np.sum(np.log(ps) / (ps * (ps - 2.0))))


def lemma4_log(
    j: int,
    x_ladder: Sequence[int],
    tables: ArithTables,
    *,
    p_cut: int = CONST_P_CUT,
    backend: str | None = None,
) -> LemmaReport:
    """-sum_{n<=x} mu(n) mu.phi((n,j)) log n / phi^2(n) against its limit:

        2 | j:  S_2(j) [ sum_{p not| j} log p/(p(p-2)) - sum_{p|j} log p/p ],
        2 not| j:  S_2(2j) * (log 2)/2.

    The error is O(j* d(j*) log 2x / (phi(j*) x)); the scaled error divides
    it out and should stay bounded.
    """
    if j == 0:
        raise ValueError("j must be nonzero")
    ladder = _check_ladder(x_ladder, tables)
    x_max = ladder[-1]
    vals = multiplicative_values(_lemma4_fvals(j, 1, x_max), x_max, tables, backend)
    logn = np.zeros(x_max + 1, dtype=np.float64)
    logn[1:] = np.log(np.arange(1, x_max + 1, dtype=np.float64))
    lhs = tuple(-v for v in ladder_sums(vals, ladder, weight=logn))

    jp = _distinct_primes(j)
    if j % 2 == 0:
        s2j = singular_Sn(2, j).value
        base = _sum_logp_p_pminus2(p_cut)
        for p in jp:
            if p > 2:
                base -= math.log(p) / (p * (p - 2.0))
        base -= math.fsum(math.log(p) / p for p in jp)
        main_c = s2j * base
    else:
        main_c = singular_Sn(2, 2 * j).value * (math.log(2.0) / 2.0)
    main = tuple(main_c for _ in ladder)

    j_star = _squarefree_kernel_int(j)
    d_js = 2 ** len(jp)
    phi_js = 1
    for p in jp:
        phi_js *= p - 1
    scaled = tuple(
        (l - main_c) * x * phi_js / (j_star * d_js * math.log(2.0 * x))
        for l, x in zip(lhs, ladder)
    )
    return LemmaReport(
        which=4,
        x_ladder=ladder,
        lhs=lhs,
        main=main,
        scaled_error=scaled,
        params=(("j", str(j)), ("p_cut", str(p_cut)), ("variant", "log")),
        extras=(("main_constant", main_c),),
    )


# --------------------------------------------------------------------------
# Lemma 5: the twisted divisor-weight sum


def _lemma5_fvals(J: int, k: int, x_max: int) -> np.ndarray:
    """Per-prime factors of the weight

        mu(n) d(n)/(phi(n) phi_2(n/(n,2))) (mu/d)((n,J)) (mu/phi)((n,k))
        phi_2((n/(n,2), J)) :

    p=2 -> +1 if 2 not| k else -1;   p>2, p|k -> -1/(p-1)^2;
    p>2, p|J, p not| k -> +1/(p-1);  p>2, p not| J -> -2/((p-1)(p-2)).
    """
    ps = primes_up_to(x_max)[1:]  # odd primes; p = 2 is set explicitly below
    psf = ps.astype(np.float64)
    fv = np.zeros(x_max + 1, dtype=np.float64)
    fv[ps] = -2.0 / ((psf - 1.0) * (psf - 2.0))
    Jp = _distinct_primes(J)
    kp = _distinct_primes(k)
    for p in Jp:
        if 2 < p <= x_max:
            fv[p] = 1.0 / (p - 1.0)
    for p in kp:
        if 2 < p <= x_max:
            fv[p] = -1.0 / (p - 1.0) ** 2
    if x_max >= 2:
        fv[2] = 1.0 if k % 2 != 0 else -1.0
    return fv


def _lemma5_main(J: int, k: int, p_cut: int) -> float:
    """2 [2 not| k] prod_{p not| J}(1 - 2/((p-1)(p-2)))
    prod_{p|J, p>2, p not| k}(1 + 1/(p-1)) prod_{p|k, p>2}(1 - 1/(p-1)^2).

    Evaluated over p <= p_cut; an exactly-zero factor (p=3 when 3 does not
    divide J) short-circuits to 0.0.
    """
    if k % 2 == 0:
        return 0.0
    Jp = set(_distinct_primes(J))
    kp = set(_distinct_primes(k))
    if 3 not in Jp:
        return 0.0  # the p=3 generic factor 1 - 2/((p-1)(p-2)) vanishes
    ps = primes_up_to(p_cut)[1:]  # odd primes; p = 2 contributes the leading 2
    psf = ps.astype(np.float64)
    factors = 1.0 - 2.0 / ((psf - 1.0) * (psf - 2.0))
    out = 2.0
    corr = Fraction(1)
    for p in sorted(Jp | kp):
        if p <= 2 or p > p_cut:
            continue
        factors[int(np.searchsorted(ps, p))] = 1.0
        if p in kp:
            corr *= Fraction((p - 1) ** 2 - 1, (p - 1) ** 2)
        else:
            corr *= Fraction(p, p - 1)
    return out * float(np.exp(np.sum(np.log(factors)))) * float(corr)


def lemma5(
    J: int,
    k: int,
    x_ladder: Sequence[int],
    tables: ArithTables,
    *,
    p_cut: int = DEFAULT_P_CUT,
    backend: str | None = None,
) -> LemmaReport:
    """The twisted sum of ``_lemma5_fvals`` weights against its Euler product.

    Preconditions: J even and nonzero, k a positive divisor of J.  The
    error is O(x^{-1+eps}); the recorded scaled error multiplies by
    x^{0.9} (eps = 0.1) and should stay bounded.
    """
    if J == 0 or J % 2 != 0:
        raise ValueError(f"J must be even and nonzero, got {J}")
    if k < 1 or J % k != 0:
        raise ValueError(f"k must be a positive divisor of J, got k={k}, J={J}")
    ladder = _check_ladder(x_ladder, tables)
    x_max = ladder[-1]
    vals = multiplicative_values(_lemma5_fvals(J, k, x_max), x_max, tables, backend)
    lhs = ladder_sums(vals, ladder)
    main_c = _lemma5_main(J, k, p_cut)
    main = tuple(main_c for _ in ladder)
    scaled = tuple((l - main_c) * x**0.9 for l, x in zip(lhs, ladder))
    return LemmaReport(
        which=5,
        x_ladder=ladder,
        lhs=lhs,
        main=main,
        scaled_error=scaled,
        params=(("J", str(J)), ("k", str(k)), ("p_cut", str(p_cut))),
        extras=(("main_constant", main_c),),
    )


# --------------------------------------------------------------------------
# the multiplicative log-sum identity


def mult_identity_check(n: int, f: Callable[[int], Fraction]) -> Fraction:
    """Max |coefficient difference| for the identity

        sum_{d|n} mu^2(d) f(d) log d
            = ( sum_{p|n} f(p) log p / (1 + f(p)) ) * prod_{p|n} (1 + f(p)),

    with both sides expanded as exact rational coefficient vectors of
    {log p : p | n} (squarefree d only; f multiplicative).  Returns 0 when
    the identity holds, which it must for every n != 0 with 1 + f(p) != 0.
    """
    if n == 0:
        raise ValueError("n must be nonzero")
    ps = _distinct_primes(n)
    fp = {p: Fraction(f(p)) for p in ps}
    for p, v in fp.items():
        if 1 + v == 0:
            raise ValueError(f"1 + f(p) vanishes at p={p}; identity undefined")
    # LHS coefficient of log p: sum over squarefree d | n with p | d of f(d)
    lhs: dict[int, Fraction] = {p: Fraction(0) for p in ps}
    for r in range(1, len(ps) + 1):
        for sub in combinations(ps, r):
            fd = Fraction(1)
            for p in sub:
                fd *= fp[p]
            for p in sub:
                lhs[p] += fd
    prod = Fraction(1)
    for p in ps:
        prod *= 1 + fp[p]
    worst = Fraction(0)
    for p in ps:
        rhs_p = fp[p] / (1 + fp[p]) * prod
        diff = abs(lhs[p] - rhs_p)
        if diff > worst:
            worst = diff
    return worst
