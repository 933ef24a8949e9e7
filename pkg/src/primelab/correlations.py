"""Correlation sums of the divisor-sum approximants against shift patterns.

For a pattern of distinct shifts (j_1, ..., j_r) with multiplicities
(a_1, ..., a_r), k = a_1 + ... + a_r, the pure sum is

    S_k(N, j, a) = sum_{n=1}^{N} prod_i lambda_R(n + j_i)^{a_i},

and the mixed sum S~_k replaces the last factor (a_r = 1) by the genuine
von Mangoldt function Lambda(n + j_r).  Out-of-range arguments n + j <= 0
contribute factor 0, matching lambda_R = Lambda = 0 there.  The expected
main terms at level R = N^theta are

    S_k  ~ C_k(a) * S(j) * N * (log R)^(k-r),
    S~_k ~          S(j) * N * (log R)^(k-r),

with C_k(a) = 1 for every multiplicity pattern with k <= 3 except the
pure cube a = (3), where C_3(3) = 3/4.  S(j) is the singular series of
the shift tuple.

The pair sum at k = 2 collapses to an exact rational in R:

    S_2(N, (0, j), (1, 1)) = N * sum_{r <= R} mu(r) mu((j,r)) phi((j,r)) / phi(r)^2
                              + (boundary/rounding error bounded by
                                 (sum_{r<=R} mu^2(r) sigma(r)/phi(r))^2),

via the divisor-pair kernel

    sum_{d | r1, e | r2, (d,e) | j} mu(d) mu(e) (d, e)
        = 0 if r1 != r2, else mu(r1) mu((j, r1)) phi((j, r1))

for squarefree r1, r2 (standard gcd, so (0, r) = r covers j = 0).  The
analogous triple kernel over d, e, f | a is multiplicative over p | a with
local factors -(p-1)(p-2) / (p-2) / (-2) according to whether p divides
all / exactly one / none of {j1 - j2, j1, j2}.  Both kernels exist as
literal divisor sums (brute) and closed forms, plus grid scans used by the
acceptance gate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from . import approximants as ap
from . import singular as sg
from . import tables as tables_mod
from ._backend import njit, resolve_backend
from .constants import DEFAULT_P_CUT
from .tables import ArithTables


@dataclass(frozen=True)
class ShiftPattern:
    """Distinct integer shifts with positive multiplicities."""

    shifts: tuple[int, ...]
    multiplicities: tuple[int, ...]

    def __post_init__(self):
        if len(self.shifts) != len(self.multiplicities):
            raise ValueError("shifts and multiplicities must have equal length")
        if len(self.shifts) == 0:
            raise ValueError("pattern must contain at least one shift")
        if len(set(self.shifts)) != len(self.shifts):
            raise ValueError(f"shifts must be distinct, got {self.shifts}")
        if any(a < 1 for a in self.multiplicities):
            raise ValueError("multiplicities must be >= 1")

    @property
    def r(self) -> int:
        return len(self.shifts)

    @property
    def k(self) -> int:
        return sum(self.multiplicities)

    @classmethod
    def parse(cls, text: str) -> "ShiftPattern":
        """Parse 'shift:mult,shift:mult,...'; a bare 'shift' means mult 1."""
        shifts, mults = [], []
        for piece in text.split(","):
            piece = piece.strip()
            if not piece:
                continue
            if ":" in piece:
                s, m = piece.split(":", 1)
                shifts.append(int(s))
                mults.append(int(m))
            else:
                shifts.append(int(piece))
                mults.append(1)
        return cls(tuple(shifts), tuple(mults))

    def __str__(self) -> str:
        return ",".join(f"{s}:{a}" for s, a in zip(self.shifts, self.multiplicities))


@dataclass(frozen=True)
class PredictionConstants:
    """Main-term constants C_k(a) for multiplicity partitions with k <= 3."""

    table: dict = None  # partition (sorted desc) -> constant

    def __post_init__(self):
        if self.table is None:
            object.__setattr__(
                self,
                "table",
                {
                    (1,): 1.0,
                    (2,): 1.0,
                    (1, 1): 1.0,
                    (3,): 0.75,
                    (2, 1): 1.0,
                    (1, 1, 1): 1.0,
                },
            )

    def c_of(self, multiplicities: tuple[int, ...]) -> float | None:
        key = tuple(sorted(multiplicities, reverse=True))
        return self.table.get(key)


PREDICTION_CONSTANTS = PredictionConstants()


@dataclass(frozen=True)
class CorrelationResult:
    pattern: ShiftPattern
    N: int
    R: int
    computed: float
    predicted_main: float | None
    residual: float | None
    normalized_residual: float | None
    exact_value: Fraction | None = None
    mixed: bool = False
    primed_range: bool = False


def _window(arr: np.ndarray, j: int, n_lo: int, n_hi: int) -> np.ndarray:
    """Values arr[n + j] for n = n_lo..n_hi, taking index <= 0 as 0."""
    count = n_hi - n_lo + 1
    lo = n_lo + j
    if lo >= 1:
        return arr[lo : n_hi + j + 1]
    out = np.zeros(count, dtype=arr.dtype)
    first_n = 1 - j  # smallest n with n + j >= 1
    if first_n <= n_hi:
        out[first_n - n_lo :] = arr[1 : n_hi + j + 1]
    return out


def _check_range(N: int, pattern: ShiftPattern, tables: ArithTables, primed: bool):
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    max_j = max(pattern.shifts)
    if max(abs(s) for s in pattern.shifts) > N:
        raise ValueError("shifts must satisfy |j| <= N")
    top = (2 * N if primed else N) + max(max_j, 0)
    if top > tables.n_max:
        raise ValueError(
            f"need tables up to {top}, have n_max={tables.n_max}"
        )


def s_k(
    N: int,
    pattern: ShiftPattern,
    R: int,
    tables: ArithTables,
    exact: bool = False,
    primed_range: bool = False,
    p_cut: int = DEFAULT_P_CUT,
    backend: str | None = None,
) -> CorrelationResult:
    """Correlation sum of pure lambda_R powers over the given pattern.

    exact=True additionally evaluates the sum as an exact rational
    (requires R within the exact-weight guard).  primed_range=True sums
    over n in [N+1, 2N] instead of [1, N].  Predictions are attached for
    k <= 3; larger k is computed but carries no prediction.
    """
    _check_range(N, pattern, tables, primed_range)
    if R < 1:
        raise ValueError(f"R must be >= 1, got {R}")
    n_lo, n_hi = (N + 1, 2 * N) if primed_range else (1, N)
    top = n_hi + max(max(pattern.shifts), 0)

    weights = ap.build_weights(R, exact=exact)
    lam_arr = ap.lambda_R_range(top, weights, backend=backend)
    acc = np.ones(n_hi - n_lo + 1, dtype=np.float64)
    for j, a in zip(pattern.shifts, pattern.multiplicities):
        acc *= _window(lam_arr, j, n_lo, n_hi) ** a
    computed = float(np.sum(acc))

    exact_value = None
    if exact:
        vals = ap.lambda_R_range_exact(top, weights)
        D = weights.denominator
        total = 0
        for n in range(n_lo, n_hi + 1):
            term = 1
            for j, a in zip(pattern.shifts, pattern.multiplicities):
                m = n + j
                term *= vals[m] ** a if m >= 1 else 0
            total += term
        exact_value = Fraction(total, D**pattern.k)
        computed = float(exact_value)

    predicted = _predict_main(N, pattern, R, mixed=False, p_cut=p_cut)
    return CorrelationResult(
        pattern=pattern,
        N=N,
        R=R,
        computed=computed,
        predicted_main=predicted,
        residual=None if predicted is None else computed - predicted,
        normalized_residual=(
            None if predicted in (None, 0.0) else computed / predicted - 1.0
        ),
        exact_value=exact_value,
        primed_range=primed_range,
    )


def s_tilde_k(
    N: int,
    pattern: ShiftPattern,
    R: int,
    tables: ArithTables,
    primed_range: bool = False,
    p_cut: int = DEFAULT_P_CUT,
    backend: str | None = None,
) -> CorrelationResult:
    """Mixed correlation sum: lambda_R powers on the leading shifts, Lambda
    on the last shift (whose multiplicity must be 1).

    r = 1 needs no approximant at all: S~_1(N, (j)) = psi(N+j) - psi(j)
    for j >= 0 (window of the prefix sums), which is N + O(|j| log N)
    under the usual error terms.
    """
    _check_range(N, pattern, tables, primed_range)
    if pattern.multiplicities[-1] != 1:
        raise ValueError("mixed pattern requires multiplicity 1 on the last shift")
    n_lo, n_hi = (N + 1, 2 * N) if primed_range else (1, N)

    lam_von = _window(tables.lam, pattern.shifts[-1], n_lo, n_hi)
    if pattern.r == 1:
        computed = float(np.sum(lam_von))
    else:
        if R < 1:
            raise ValueError(f"R must be >= 1, got {R}")
        top = n_hi + max(max(pattern.shifts), 0)
        weights = ap.build_weights(R)
        lam_arr = ap.lambda_R_range(top, weights, backend=backend)
        acc = np.ones(n_hi - n_lo + 1, dtype=np.float64)
        for j, a in zip(pattern.shifts[:-1], pattern.multiplicities[:-1]):
            acc *= _window(lam_arr, j, n_lo, n_hi) ** a
        computed = float(np.sum(acc * lam_von))

    predicted = _predict_main(N, pattern, R, mixed=True, p_cut=p_cut)
    return CorrelationResult(
        pattern=pattern,
        N=N,
        R=R,
        computed=computed,
        predicted_main=predicted,
        residual=None if predicted is None else computed - predicted,
        normalized_residual=(
            None if predicted in (None, 0.0) else computed / predicted - 1.0
        ),
        mixed=True,
        primed_range=primed_range,
    )


def _predict_main(
    N: int, pattern: ShiftPattern, R: int, mixed: bool, p_cut: int
) -> float | None:
    k, r = pattern.k, pattern.r
    if mixed:
        c = 1.0
    else:
        c = PREDICTION_CONSTANTS.c_of(pattern.multiplicities)
        if c is None:
            return None
    sing = sg.singular_vector(pattern.shifts, p_cut=p_cut).value
    return c * sing * N * math.log(R) ** (k - r)


def psi_tuple(N: int, shifts: tuple[int, ...], tables: ArithTables) -> float:
    """psi_j(N) = sum_{n <= N} prod_i Lambda(n + j_i) over distinct shifts."""
    pattern = ShiftPattern(tuple(shifts), (1,) * len(shifts))
    _check_range(N, pattern, tables, primed=False)
    if pattern.r == 1:
        return float(np.sum(_window(tables.lam, pattern.shifts[0], 1, N)))
    acc = _window(tables.lam, pattern.shifts[0], 1, N).copy()
    for j in pattern.shifts[1:]:
        acc *= _window(tables.lam, j, 1, N)
    return float(np.sum(acc))


# ---------------------------------------------------------------------------
# reduced rational form of the pair sum
# ---------------------------------------------------------------------------


def s2_reduced(N: int, j: int, R: int) -> Fraction:
    """N * sum_{r <= R} mu(r) mu((j,r)) phi((j,r)) / phi(r)^2, exact.

    This is the diagonal collapse of the pair correlation; standard gcd
    makes j = 0 give N * script_L_1(R) with no special-casing.  As R grows
    (even j != 0) it converges to N * S_2(j).
    """
    if R < 1:
        raise ValueError(f"R must be >= 1, got {R}")
    if R > ap.EXACT_R_MAX:
        raise ValueError(f"exact reduced sum limited to R <= {ap.EXACT_R_MAX}")
    tb = ap._small_tables(R)
    acc = Fraction(0)
    for r in range(1, R + 1):
        if tb.mu[r] == 0:
            continue
        g = math.gcd(abs(j), r)
        acc += Fraction(int(tb.mu[r]) * int(tb.mu[g]) * int(tb.phi[g]), int(tb.phi[r]) ** 2)
    return N * acc


def s2_reduced_float(N: int, j: int, R: int) -> float:
    """Float version of s2_reduced for large R."""
    if R < 1:
        raise ValueError(f"R must be >= 1, got {R}")
    tb = ap._small_tables(R)
    r = np.arange(R + 1, dtype=np.int64)
    g = np.gcd(r, abs(j)) if j != 0 else r.copy()
    mask = tb.mu[: R + 1] != 0
    mask[0] = False
    gm = g[mask]
    num = tb.mu[: R + 1][mask].astype(np.float64) * tb.mu[gm] * tb.phi[gm]
    den = tb.phi[: R + 1][mask].astype(np.float64) ** 2
    return N * float(np.sum(num / den))


# ---------------------------------------------------------------------------
# divisor kernels: brute sums, closed forms, and grid scans
# ---------------------------------------------------------------------------


def _require_squarefree(r: int, tb: ArithTables) -> None:
    if r < 1 or tb.mu[r] == 0:
        raise ValueError(f"argument must be squarefree and >= 1, got {r}")


def _divisors(r: int, tb: ArithTables) -> list[int]:
    divs = [1]
    if r > 1:
        for p, _e in tb.factor(r):
            divs += [d * p for d in divs]
    return sorted(divs)


def pair_kernel(r1: int, r2: int, j: int) -> int:
    """Brute divisor sum: sum_{d | r1, e | r2, (d,e) | j} mu(d) mu(e) (d,e).

    Standard gcd conventions: every (d,e) divides j = 0.
    """
    tb = ap._small_tables(max(r1, r2))
    _require_squarefree(r1, tb)
    _require_squarefree(r2, tb)
    total = 0
    for d in _divisors(r1, tb):
        for e in _divisors(r2, tb):
            g = math.gcd(d, e)
            if j % g == 0:
                total += int(tb.mu[d]) * int(tb.mu[e]) * g
    return total


def pair_kernel_closed(r1: int, r2: int, j: int) -> int:
    """Closed form: 0 unless r1 = r2 = r, else mu(r) mu((j,r)) phi((j,r))."""
    tb = ap._small_tables(max(r1, r2))
    _require_squarefree(r1, tb)
    _require_squarefree(r2, tb)
    if r1 != r2:
        return 0
    g = math.gcd(abs(j), r1)
    return int(tb.mu[r1]) * int(tb.mu[g]) * int(tb.phi[g])


def triple_kernel(a: int, j1: int, j2: int) -> int:
    """Brute sum over d, e, f | a with (d,e) | j1-j2, (d,f) | j1, (e,f) | j2
    of mu(d) mu(e) mu(f) * d*e*f / [d,e,f], for squarefree a."""
    tb = ap._small_tables(max(a, 2))
    _require_squarefree(a, tb)
    divs = _divisors(a, tb)
    dj = j1 - j2
    total = 0
    for d in divs:
        for e in divs:
            if dj % math.gcd(d, e) != 0:
                continue
            for f in divs:
                if j1 % math.gcd(d, f) != 0 or j2 % math.gcd(e, f) != 0:
                    continue
                lcm = d * e // math.gcd(d, e)
                lcm = lcm * f // math.gcd(lcm, f)
                total += (
                    int(tb.mu[d]) * int(tb.mu[e]) * int(tb.mu[f]) * (d * e * f // lcm)
                )
    return total


def triple_kernel_closed(a: int, j1: int, j2: int) -> int:
    """Closed multiplicative form of triple_kernel: product over p | a of

        -(p-1)(p-2)  if p divides j1, j2 (hence j1 - j2),
        (p-2)        if p divides exactly one of {j1 - j2, j1, j2},
        -2           if p divides none.
    """
    tb = ap._small_tables(max(a, 2))
    _require_squarefree(a, tb)
    total = 1
    dj = j1 - j2
    for p, _e in tb.factor(a) if a > 1 else []:
        d1, d2, dd = j1 % p == 0, j2 % p == 0, dj % p == 0
        hits = int(d1) + int(d2) + int(dd)
        if hits == 3:
            total *= -(p - 1) * (p - 2)
        elif hits == 1:
            total *= p - 2
        elif hits == 0:
            total *= -2
        else:  # two of the three conditions force the third
            raise AssertionError("p dividing two of {j1-j2, j1, j2} divides all")
    return total


def pair_kernel_scan(
    r_max: int, j_lo: int, j_hi: int, backend: str | None = None
) -> int:
    """Count grid violations of the pair-kernel identity over squarefree
    r1, r2 <= r_max and j in [j_lo, j_hi].  Returns 0 when the closed form
    matches the brute sum everywhere."""
    tb = ap._small_tables(r_max)
    sf = [r for r in range(1, r_max + 1) if tb.mu[r] != 0]
    if resolve_backend(backend) == "numba":
        sf_arr = np.array(sf, dtype=np.int64)
        mu = tb.mu[: r_max + 1].astype(np.int64)
        phi = tb.phi[: r_max + 1].astype(np.int64)
        maxd = max(int(tb.num_div[r]) for r in sf)
        divs = np.zeros((r_max + 1, maxd), dtype=np.int64)
        divcnt = np.zeros(r_max + 1, dtype=np.int64)
        for r in sf:
            ds = _divisors(r, tb)
            divcnt[r] = len(ds)
            divs[r, : len(ds)] = ds
        return int(
            _pair_scan_kernel_full(sf_arr, mu, phi, divs, divcnt, j_lo, j_hi)
        )
    bad = 0
    for r1 in sf:
        d1 = np.array(_divisors(r1, tb), dtype=np.int64)
        m1 = tb.mu[d1].astype(np.int64)
        for r2 in sf:
            d2 = np.array(_divisors(r2, tb), dtype=np.int64)
            m2 = tb.mu[d2].astype(np.int64)
            g = np.gcd.outer(d1, d2)
            coef = np.outer(m1, m2) * g
            for j in range(j_lo, j_hi + 1):
                total = int(np.sum(coef[j % g == 0]))
                if r1 != r2:
                    closed = 0
                else:
                    gg = math.gcd(abs(j), r1)
                    closed = int(tb.mu[r1]) * int(tb.mu[gg]) * int(tb.phi[gg])
                if total != closed:
                    bad += 1
    return bad


@njit(cache=True)
def _pair_scan_kernel_full(sf, mu, phi, divs, divcnt, j_lo, j_hi):  # pragma: no cover
    bad = 0
    for i1 in range(sf.size):
        r1 = sf[i1]
        for i2 in range(sf.size):
            r2 = sf[i2]
            for j in range(j_lo, j_hi + 1):
                total = 0
                for a in range(divcnt[r1]):
                    d = divs[r1, a]
                    md = mu[d]
                    for b in range(divcnt[r2]):
                        e = divs[r2, b]
                        x, y = d, e
                        while y:
                            x, y = y, x % y
                        if j % x == 0:
                            total += md * mu[e] * x
                if r1 != r2:
                    closed = 0
                else:
                    x = j if j >= 0 else -j
                    y = r1
                    while y:
                        x, y = y, x % y
                    closed = mu[r1] * mu[x] * phi[x]
                if total != closed:
                    bad += 1
    return bad


@njit(cache=True)
def _triple_scan_kernel(sf, mu, divs, divcnt, spf, j_abs):  # pragma: no cover
    bad = 0
    for ia in range(sf.size):
        a = sf[ia]
        nd = divcnt[a]
        for j1 in range(-j_abs, j_abs + 1):
            for j2 in range(-j_abs, j_abs + 1):
                if j1 == j2:
                    continue
                dj = j1 - j2
                total = 0
                for x1 in range(nd):
                    d = divs[a, x1]
                    for x2 in range(nd):
                        e = divs[a, x2]
                        u, v = d, e
                        while v:
                            u, v = v, u % v
                        if dj % u != 0:
                            continue
                        lam_de = d * e // u
                        for x3 in range(nd):
                            f = divs[a, x3]
                            u, v = d, f
                            while v:
                                u, v = v, u % v
                            if j1 % u != 0:
                                continue
                            u, v = e, f
                            while v:
                                u, v = v, u % v
                            if j2 % u != 0:
                                continue
                            u, v = lam_de, f
                            while v:
                                u, v = v, u % v
                            lcm = lam_de * f // u
                            total += mu[d] * mu[e] * mu[f] * (d * e * f // lcm)
                # closed form: multiplicative over p | a
                closed = 1
                m = a
                while m > 1:
                    p = spf[m]
                    while m % p == 0:
                        m //= p
                    hits = 0
                    if j1 % p == 0:
                        hits += 1
                    if j2 % p == 0:
                        hits += 1
                    if dj % p == 0:
                        hits += 1
                    if hits == 3:
                        closed *= -(p - 1) * (p - 2)
                    elif hits == 1:
                        closed *= p - 2
                    else:
                        closed *= -2
                if total != closed:
                    bad += 1
    return bad


def triple_kernel_scan(a_max: int, j_abs: int, backend: str | None = None) -> int:
    """Count grid violations of the triple-kernel identity over squarefree
    a <= a_max and distinct j1, j2 in [-j_abs, j_abs]."""
    tb = ap._small_tables(a_max)
    sf = [r for r in range(1, a_max + 1) if tb.mu[r] != 0]
    if resolve_backend(backend) == "numba":
        sf_arr = np.array(sf, dtype=np.int64)
        mu = tb.mu[: a_max + 1].astype(np.int64)
        maxd = max(int(tb.num_div[r]) for r in sf)
        divs = np.zeros((a_max + 1, maxd), dtype=np.int64)
        divcnt = np.zeros(a_max + 1, dtype=np.int64)
        for r in sf:
            ds = _divisors(r, tb)
            divcnt[r] = len(ds)
            divs[r, : len(ds)] = ds
        spf = tb.spf[: a_max + 1].astype(np.int64)
        return int(_triple_scan_kernel(sf_arr, mu, divs, divcnt, spf, j_abs))
    bad = 0
    for a in sf:
        for j1 in range(-j_abs, j_abs + 1):
            for j2 in range(-j_abs, j_abs + 1):
                if j1 == j2:
                    continue
                if triple_kernel(a, j1, j2) != triple_kernel_closed(a, j1, j2):
                    bad += 1
    return bad
