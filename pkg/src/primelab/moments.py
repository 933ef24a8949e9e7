"""Moments of psi_R- and psi-increments over short intervals.

For f in {psi_R, psi} and a window length h >= 1 the k-th moment is

    M_k(N, h, f) = sum_{n=1}^{N} (f(n+h) - f(n))^k ,

optionally over the shifted range n in [N+1, 2N] (``primed=True``) and
optionally centered at h (``centered=True``, psi only).  Because

    psi_R(n+h) - psi_R(n) = sum_{j=1}^{h} lambda_R(n+j),

expanding the k-th power and grouping equal shifts turns M_k(N, h, psi_R)
into an exact finite rearrangement over correlation sums:

    M_k = sum_{r=1}^{k} sum_{1<=j_1<...<j_r<=h} sum_{a_1+...+a_r=k, a_i>=1}
          k!/(a_1!...a_r!) * S_k(N, (j_1..j_r), (a_1..a_r)).

``moment_psiR`` evaluates the left side directly, ``expand_via_correlations``
the right side; in exact rational mode the two agree identically, in float
mode to rounding error.  Mixed moments

    Mtilde_k = sum_n (psi_R(n+h)-psi_R(n))^{k-1} (psi(n+h)-psi(n))

have an analogous expansion whose diagonal terms are replaced by
L_1(R)-multiples of lower correlations; that replacement drops prime-power
and small-prime terms of size O(R N^eps), so for mixed moments the
expansion-vs-direct gap is *reported*, never asserted to vanish.

``omega_experiment`` computes the centered quantities

    M'_k = sum_{n=N+1}^{2N} (psi_R-inc - h - C*A)^{k-1} (psi-inc - h - rho*A),
    A = (h log N)^{1/2},

both directly and through the binomial rearrangement into uncentered power
sums, which is an exact array-level identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from .approximants import (
    ApproximantWeights,
    build_weights,
    lambda_R_range,
    lambda_R_range_exact,
    script_L_float,
)
from .tables import ArithTables

__all__ = [
    "MomentReport",
    "FirstMomentReport",
    "OmegaExperiment",
    "moment_psiR",
    "expand_via_correlations",
    "moment_psi",
    "stirling2",
    "gallagher_prediction",
    "ms_prediction",
    "first_moment_identity",
    "mixed_moment",
    "omega_experiment",
    "omega_expansions",
    "h_from_lambda",
    "coupled_C",
]


# --------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class MomentReport:
    """One evaluated moment cell.

    ``computed`` is the direct window sum, ``via_correlations`` the
    shifted-correlation expansion when it was requested (exactly equal in
    rational mode for pure psi_R moments, reported gap for mixed moments),
    ``predicted`` the heuristic main term when one is available for (kind, k),
    and ``lambda_param`` = h / log N records the window in sieve-scaled units.
    """

    kind: str  # "psi_R" | "psi" | "mixed"
    k: int
    N: int
    h: int
    R: int | None
    lambda_param: float
    computed: float | Fraction
    via_correlations: float | Fraction | None = None
    predicted: float | None = None
    expansion_residual: float | Fraction | None = None
    prediction_residual: float | None = None
    centered: bool = False
    primed: bool = False
    exact: bool = False


@dataclass(frozen=True)
class FirstMomentReport:
    """Three evaluations of M_1(N, h, psi) that must coincide.

    * ``direct``       — sum_{n<=N} (psi(n+h) - psi(n)),
    * ``three_piece``  — sum_{m<=h}(m-1)Lambda(m) + h(psi(N)-psi(h))
                          + sum_{N<m<=N+h}(N+h-m+1)Lambda(m),
    * ``psi_form``     — psi(N+h) - psi(N) - psi(h)
                          - sum_{i=2}^{h-1} psi(i) + sum_{i=N}^{N+h-1} psi(i),
      i.e. the partial-summation form with the integrals of the step
      function psi evaluated exactly as unit-step sums.

    All three are exact rearrangements of one another.  ``exact_equal_12``
    and ``exact_equal_13`` compare integer log-coefficient vectors (the
    multiplicity each prime power q receives in sums of Lambda(q)), so they
    certify the identities with no floating point involved.
    """

    N: int
    h: int
    direct: float
    three_piece: float
    psi_form: float
    exact_equal_12: bool
    exact_equal_13: bool
    max_abs_diff: float


@dataclass(frozen=True)
class OmegaExperiment:
    """Centered third-moment experiment over the dyadic range [N+1, 2N].

    With U(n) = psi_R(n+h) - psi_R(n), V(n) = psi(n+h) - psi(n),
    a = h + C*A, b = h + rho*A, A = (h log N)^{1/2}:

        m1 = sum (V - b),   m2 = sum (U - a)(V - b),
        m3 = sum (U - a)^2 (V - b).

    ``expansion_m2``/``expansion_m3`` recompute m2/m3 from the uncentered
    power sums via the binomial identity (an exact rearrangement; float
    agreement to rounding, exact for rational inputs).  The
    ``identity_residual_k`` fields report |expansion_mk - mk| / max(1, |mk|),
    the relative disagreement of the two float evaluations.  ``predicted_m3``
    is the conjectured main term

        -N h^{3/2} (log N)^{1/2} (rho C^2 log N + (2C + rho) log(R/h)),

    attached for reference only: the proven range for it starts around
    h >> log^{14} N, far beyond any feasible table, so observed signs and
    sizes are labeled "outside proven regime".
    """

    N: int
    h: int
    R: int
    rho: float
    C: float
    A: float
    m1: float
    m2: float
    m3: float
    expansion_m2: float
    expansion_m3: float
    identity_residual_2: float
    identity_residual_3: float
    predicted_m3: float


# --------------------------------------------------------------------------
# small combinatorial helpers


def stirling2(k: int, r: int) -> int:
    """Stirling number of the second kind {k, r} for 1 <= r <= k <= 20.

    {k, r} counts partitions of a k-set into r nonempty blocks; recurrence
    {k, r} = r {k-1, r} + {k-1, r-1} with {1, 1} = 1.
    """
    if not (1 <= r <= k <= 20):
        raise ValueError(f"stirling2 requires 1 <= r <= k <= 20, got k={k}, r={r}")
    row = [1]  # row for k=1: {1,1}
    for kk in range(2, k + 1):
        new = [0] * kk
        for rr in range(1, kk + 1):
            prev_same = row[rr - 1] if rr <= kk - 1 else 0
            prev_less = row[rr - 2] if rr >= 2 else 0
            new[rr - 1] = rr * prev_same + prev_less
        row = new
    return row[r - 1]


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _multinomial(k: int, parts: Sequence[int]) -> int:
    """k! / (a_1! ... a_r!) for a composition (a_1..a_r) of k."""
    out = math.factorial(k)
    for a in parts:
        out //= math.factorial(a)
    return out


def h_from_lambda(N: int, lam: float) -> int:
    """Window length h = round(lam * log N), at least 1.

    The realized sieve-scaled window is then h / log N, which the reports
    record instead of the requested lam.
    """
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    return max(1, round(lam * math.log(N)))


def coupled_C(theta: float, alpha: float, rho: float) -> float:
    """The coupling C = -(theta - alpha)/rho used by the sign experiment.

    Here R = N^theta and h = N^alpha; the choice makes the conjectured m3
    main term proportional to -rho(theta-alpha)(1 - (theta-alpha)/rho^2),
    positive for 0 < rho < sqrt(theta-alpha) and negative on the mirror
    interval.  Requires rho != 0.
    """
    if rho == 0:
        raise ValueError("rho must be nonzero for the coupled preset")
    return -(theta - alpha) / rho


# --------------------------------------------------------------------------
# prediction main terms


def gallagher_prediction(N: int, h: int, k: int) -> float:
    """Heuristic k-th moment of psi-increments:

    N log^k N * sum_{r=1}^{k} {k, r} (h/log N)^r .
    """
    lam = h / math.log(N)
    return float(
        N
        * math.log(N) ** k
        * math.fsum(stirling2(k, r) * lam**r for r in range(1, k + 1))
    )


def ms_prediction(N: int, h: int, k: int) -> float | None:
    """Gaussian-moments prediction for the centered k-th moment, even k only:

    (k-1)!! * N * (h log(N/h))^{k/2};   None for odd k.
    """
    if k % 2 == 1:
        return None
    dfact = 1
    for m in range(k - 1, 0, -2):
        dfact *= m
    return float(dfact * N * (h * math.log(N / h)) ** (k / 2))


def _psiR_prediction(N: int, h: int, R: int, k: int) -> float | None:
    """Main term for M_k(N, h, psi_R), k <= 3, with theta = log R / log N:

    k=1: lam;  k=2: theta*lam + lam^2;
    k=3: (3/4) theta^2 lam + 3 theta lam^2 + lam^3,  all times N log^k N.
    """
    logN = math.log(N)
    theta = math.log(R) / logN
    lam = h / logN
    if k == 1:
        poly = lam
    elif k == 2:
        poly = theta * lam + lam**2
    elif k == 3:
        poly = 0.75 * theta**2 * lam + 3 * theta * lam**2 + lam**3
    else:
        return None
    return float(N * logN**k * poly)


def _mixed_prediction(N: int, h: int, R: int, k: int) -> float | None:
    """Main term for the mixed moment, k in {2, 3}:

    k=2: (theta*lam + lam^2) N log^2 N;
    k=3: (theta^2 lam + 3 theta lam^2 + lam^3) N log^3 N.

    The pure-cube constant 3/4 does not appear: the fully diagonal terms
    carry lambda_R(p)^{k-1} Lambda(p) = L_1(R)^{k-1} log p at primes p > R.
    """
    logN = math.log(N)
    theta = math.log(R) / logN
    lam = h / logN
    if k == 2:
        poly = theta * lam + lam**2
    elif k == 3:
        poly = theta**2 * lam + 3 * theta * lam**2 + lam**3
    else:
        return None
    return float(N * logN**k * poly)


# --------------------------------------------------------------------------
# window machinery


def _start_index(N: int, primed: bool) -> int:
    """First summation index: 1, or N+1 for the dyadic range [N+1, 2N]."""
    return N + 1 if primed else 1


def _lam_windows_float(
    N: int, h: int, weights: ApproximantWeights, start: int, backend: str | None
) -> tuple[np.ndarray, np.ndarray]:
    """(values, windows): lambda_R(0..start+N-1+h) and the N window sums.

    windows[i] = sum_{j=1}^{h} lambda_R(start+i+j), accumulated through a
    long-double prefix so the h-fold sums carry no cancellation noise.
    """
    n_top = start + N - 1 + h
    vals = lambda_R_range(n_top, weights, backend)
    pre = np.cumsum(vals.astype(np.longdouble))
    win = (pre[start + h : start + N + h] - pre[start : start + N]).astype(np.float64)
    return vals, win


def _lam_windows_exact(
    N: int, h: int, weights: ApproximantWeights, start: int
) -> tuple[list[int], list[int]]:
    """Integer analogue of ``_lam_windows_float`` (values scaled by D)."""
    n_top = start + N - 1 + h
    vals = lambda_R_range_exact(n_top, weights)
    win = [0] * N
    acc = sum(vals[start + 1 : start + h + 1])
    win[0] = acc
    for i in range(1, N):
        acc += vals[start + h + i] - vals[start + i]
        win[i] = acc
    return vals, win


def _psi_windows(N: int, h: int, tables: ArithTables, start: int) -> np.ndarray:
    """windows[i] = psi(start+i+h) - psi(start+i) from the compensated prefix."""
    n_top = start + N - 1 + h
    if n_top > tables.n_max:
        raise ValueError(
            f"need tables up to {n_top}, have n_max={tables.n_max}"
        )
    pp = tables.psi_prefix
    return pp[start + h : start + N + h] - pp[start : start + N]


# --------------------------------------------------------------------------
# pure psi_R moments and the grouping identity


def moment_psiR(
    N: int,
    h: int,
    R: int,
    k: int,
    *,
    exact: bool = False,
    primed: bool = False,
    expand: bool = False,
    backend: str | None = None,
) -> MomentReport:
    """M_k(N, h, psi_R) = sum_n (psi_R(n+h) - psi_R(n))^k, n over N values.

    With ``expand=True`` the correlation-sum rearrangement is evaluated as
    well and its residual attached (identically zero in exact mode).  In
    exact mode both sides are Fractions with denominator D^k, D the common
    denominator of the sieve weights.
    """
    if N < 1 or h < 1 or k < 1:
        raise ValueError(f"need N, h, k >= 1, got N={N}, h={h}, k={k}")
    start = _start_index(N, primed)
    weights = build_weights(R, exact=exact)
    computed: float | Fraction
    if exact:
        _, win = _lam_windows_exact(N, h, weights, start)
        computed = Fraction(sum(w**k for w in win), weights.denominator**k)
    else:
        _, win = _lam_windows_float(N, h, weights, start, backend)
        computed = float(np.sum(win**k))
    via: float | Fraction | None = None
    resid: float | Fraction | None = None
    if expand:
        via = expand_via_correlations(
            N, h, R, k, exact=exact, primed=primed, backend=backend
        )
        resid = via - computed
    predicted = _psiR_prediction(N, h, R, k)
    pred_resid = (
        float(computed) / predicted - 1.0 if predicted not in (None, 0.0) else None
    )
    return MomentReport(
        kind="psi_R",
        k=k,
        N=N,
        h=h,
        R=R,
        lambda_param=h / math.log(N) if N >= 2 else float("nan"),
        computed=computed,
        via_correlations=via,
        predicted=predicted,
        expansion_residual=resid,
        prediction_residual=pred_resid,
        primed=primed,
        exact=exact,
    )


def _pattern_sum_exact(wins: list[list[int]], a: tuple[int, ...]) -> int:
    """sum_n prod_i wins[i][n]^{a_i} over aligned integer windows."""
    if len(wins) == 1:
        (w1,) = wins
        a1 = a[0]
        return sum(v**a1 for v in w1)
    if len(wins) == 2:
        w1, w2 = wins
        a1, a2 = a
        return sum(v1**a1 * v2**a2 for v1, v2 in zip(w1, w2))
    total = 0
    for row in zip(*wins):
        term = 1
        for v, e in zip(row, a):
            term *= v**e
        total += term
    return total


def expand_via_correlations(
    N: int,
    h: int,
    R: int,
    k: int,
    *,
    exact: bool = False,
    primed: bool = False,
    backend: str | None = None,
) -> float | Fraction:
    """The grouping rearrangement of M_k(N, h, psi_R):

    sum_{r=1}^{k} sum_{1<=j_1<...<j_r<=h} sum_{compositions a of k}
        k!/(a_1!...a_r!) * sum_n prod_i lambda_R(n+j_i)^{a_i} .

    Every term is a shifted correlation sum S_k(N, j, a); the whole is an
    exact identity with the direct moment (same finite set of products,
    regrouped), so the exact-mode value equals the direct one identically.
    """
    if N < 1 or h < 1 or k < 1:
        raise ValueError(f"need N, h, k >= 1, got N={N}, h={h}, k={k}")
    start = _start_index(N, primed)
    n_top = start + N - 1 + h
    weights = build_weights(R, exact=exact)

    if exact:
        vals_i = lambda_R_range_exact(n_top, weights)
        wins_i = [vals_i[start + j : start + N + j] for j in range(1, h + 1)]
        tot_i = 0
        for r in range(1, k + 1):
            comps = list(_compositions(k, r))
            for js in combinations(range(1, h + 1), r):
                chosen = [wins_i[j - 1] for j in js]
                for a in comps:
                    tot_i += _multinomial(k, a) * _pattern_sum_exact(chosen, a)
        return Fraction(tot_i, weights.denominator**k)

    vals = lambda_R_range(n_top, weights, backend)
    wins = [vals[start + j : start + N + j] for j in range(1, h + 1)]
    buf = np.empty(N, dtype=np.float64)
    terms: list[float] = []
    for r in range(1, k + 1):
        comps = list(_compositions(k, r))
        for js in combinations(range(1, h + 1), r):
            chosen = [wins[j - 1] for j in js]
            for a in comps:
                np.power(chosen[0], a[0], out=buf)
                for w, e in zip(chosen[1:], a[1:]):
                    if e == 1:
                        buf *= w
                    else:
                        buf *= w**e
                terms.append(_multinomial(k, a) * float(np.sum(buf)))
    return math.fsum(terms)


# --------------------------------------------------------------------------
# pure psi moments


def moment_psi(
    N: int,
    h: int,
    k: int,
    tables: ArithTables,
    *,
    centered: bool = False,
    primed: bool = False,
) -> MomentReport:
    """M_k(N, h, psi) = sum_n (psi(n+h) - psi(n))^k, optionally centered at h.

    Predictions: uncentered k-th moment against the Stirling-polynomial
    main term N log^k N sum_r {k,r} lam^r; centered even moments against
    the Gaussian (k-1)!! N (h log(N/h))^{k/2}.  Odd centered moments carry
    no prediction (their main terms cancel).
    """
    if N < 2 or h < 1 or k < 1:
        raise ValueError(f"need N >= 2, h >= 1, k >= 1, got N={N}, h={h}, k={k}")
    start = _start_index(N, primed)
    win = _psi_windows(N, h, tables, start)
    if centered:
        win = win - float(h)
    computed = float(np.sum(win**k))
    predicted = (
        ms_prediction(N, h, k) if centered else
        (gallagher_prediction(N, h, k) if k <= 20 else None)
    )
    pred_resid = (
        computed / predicted - 1.0 if predicted not in (None, 0.0) else None
    )
    return MomentReport(
        kind="psi",
        k=k,
        N=N,
        h=h,
        R=None,
        lambda_param=h / math.log(N),
        computed=computed,
        predicted=predicted,
        prediction_residual=pred_resid,
        centered=centered,
        primed=primed,
    )


# --------------------------------------------------------------------------
# first-moment identity


def first_moment_identity(N: int, h: int, tables: ArithTables) -> FirstMomentReport:
    """Evaluate M_1(N, h, psi) three ways and certify their exact equality.

    Each route assigns an integer multiplicity c_q to every prime power q
    (the number of times Lambda(q) is counted); the float values are the
    corresponding weighted sums of log p.  Route 1 accumulates window
    indicators literally, route 2 uses the three-piece split by the
    position of q relative to [h, N], route 3 the partial-summation form
    with step-sum integrals.  The reported booleans compare the integer
    multiplicity vectors, so equality is certified exactly.
    """
    if not 1 <= h <= N:
        raise ValueError(f"need 1 <= h <= N, got h={h}, N={N}")
    if N + h > tables.n_max:
        raise ValueError(f"need tables up to {N + h}, have n_max={tables.n_max}")
    pp = tables.psi_prefix
    lamv = tables.lam

    direct = float(np.sum(pp[1 + h : N + 1 + h] - pp[1 : N + 1]))

    piece1 = float(np.dot(np.arange(1, h, dtype=np.float64), lamv[2 : h + 1])) if h >= 2 else 0.0
    piece2 = h * (float(pp[N]) - float(pp[h]))
    piece3 = float(
        np.dot(np.arange(h, 0, -1, dtype=np.float64), lamv[N + 1 : N + h + 1])
    )
    three_piece = piece1 + piece2 + piece3

    mid_lo = float(np.sum(pp[2:h])) if h >= 3 else 0.0  # sum_{i=2}^{h-1} psi(i)
    mid_hi = float(np.sum(pp[N : N + h]))  # sum_{i=N}^{N+h-1} psi(i)
    psi_form = float(pp[N + h]) - float(pp[N]) - float(pp[h]) - mid_lo + mid_hi

    # integer log-coefficient vectors over prime powers q <= N + h
    q = np.nonzero(lamv[: N + h + 1])[0].astype(np.int64)
    c1 = np.zeros(q.shape, dtype=np.int64)
    for d in range(1, h + 1):
        c1 += ((q >= 1 + d) & (q <= N + d)).astype(np.int64)
    c2 = np.where(q <= h, q - 1, np.where(q <= N, h, N + h - q + 1)).astype(np.int64)
    c3 = (
        np.ones(q.shape, dtype=np.int64)
        - (q <= N).astype(np.int64)
        - (q <= h).astype(np.int64)
        - np.maximum(h - 1 - np.maximum(q, 2) + 1, 0)
        + np.maximum(N + h - 1 - np.maximum(q, N) + 1, 0)
    )

    vals = [direct, three_piece, psi_form]
    max_diff = max(abs(a - b) for a in vals for b in vals)
    return FirstMomentReport(
        N=N,
        h=h,
        direct=direct,
        three_piece=three_piece,
        psi_form=psi_form,
        exact_equal_12=bool(np.array_equal(c1, c2)),
        exact_equal_13=bool(np.array_equal(c1, c3)),
        max_abs_diff=max_diff,
    )


# --------------------------------------------------------------------------
# mixed moments


def mixed_moment(
    N: int,
    h: int,
    R: int,
    k: int,
    tables: ArithTables,
    *,
    primed: bool = False,
    backend: str | None = None,
) -> MomentReport:
    """Mtilde_k = sum_n (psi_R-increment)^{k-1} (psi-increment), k in {2, 3}.

    ``via_correlations`` evaluates the expansion in which diagonal shift
    coincidences are replaced by L_1(R)-multiples of lower mixed
    correlation sums:

      k=2:  L_1 * sum_j Stilde_1(j) + sum_{j1 != j2} Stilde_2,
      k=3:  L_1^2 * sum_j Stilde_1 + sum_{pairs} Stilde_3(a=(2,1))
            + 2 L_1 sum_{pairs} Stilde_2 + sum_{triples} Stilde_3(a=(1,1,1)).

    The replacement is exact except at prime powers and primes <= R, so the
    expansion residual is reported, not asserted; it should be a vanishing
    fraction of the total as N grows with R = N^theta, theta < 1/2.
    """
    if k not in (2, 3):
        raise ValueError(f"mixed moments implemented for k in {{2, 3}}, got k={k}")
    if N < 2 or h < 1:
        raise ValueError(f"need N >= 2 and h >= 1, got N={N}, h={h}")
    start = _start_index(N, primed)
    n_top = start + N - 1 + h
    if n_top > tables.n_max:
        raise ValueError(f"need tables up to {n_top}, have n_max={tables.n_max}")
    weights = build_weights(R)
    lam_vals, U = _lam_windows_float(N, h, weights, start, backend)
    V = _psi_windows(N, h, tables, start)
    lamv = tables.lam
    L1 = script_L_float(R, 1)

    lam_wins = [lam_vals[start + j : start + N + j] for j in range(1, h + 1)]
    von_wins = [lamv[start + j : start + N + j] for j in range(1, h + 1)]

    T1 = float(np.sum(V))
    UVs = float(U @ V)
    Wvec = np.zeros(N, dtype=np.float64)
    for lw, vw in zip(lam_wins, von_wins):
        Wvec += lw * vw
    Ws = float(np.sum(Wvec))

    if k == 2:
        direct = UVs
        via = L1 * T1 + (UVs - Ws)
    else:
        direct = float((U * U) @ V)
        U2vec = np.zeros(N, dtype=np.float64)
        D = 0.0
        for lw, vw in zip(lam_wins, von_wins):
            sq = lw * lw
            U2vec += sq
            D += float(sq @ vw)
        B = float(U2vec @ V)
        Cc = float(Wvec @ U)
        via = (
            L1 * L1 * T1
            + (B - D)
            + 2.0 * L1 * (UVs - Ws)
            + (direct - B - 2.0 * Cc + 2.0 * D)
        )

    predicted = _mixed_prediction(N, h, R, k)
    return MomentReport(
        kind="mixed",
        k=k,
        N=N,
        h=h,
        R=R,
        lambda_param=h / math.log(N),
        computed=direct,
        via_correlations=via,
        predicted=predicted,
        expansion_residual=via - direct,
        prediction_residual=(
            direct / predicted - 1.0 if predicted not in (None, 0.0) else None
        ),
        primed=primed,
    )


# --------------------------------------------------------------------------
# centered third-moment experiment


def omega_expansions(su, sv, su2, suv, su2v, a, b, n_terms):
    """Binomial rearrangements of the centered sums, for any numeric type:

    sum (U-a)(V-b)   = suv - b*su - a*sv + a*b*n,
    sum (U-a)^2(V-b) = su2v - b*su2 - 2a*suv + 2ab*su + a^2*sv - a^2*b*n,

    where su = sum U, sv = sum V, su2 = sum U^2, suv = sum UV,
    su2v = sum U^2 V over n_terms values.  Works identically for floats
    and Fractions, which is how the identity is certified exactly.
    """
    m2 = suv - b * su - a * sv + a * b * n_terms
    m3 = (
        su2v
        - b * su2
        - 2 * a * suv
        + 2 * a * b * su
        + a * a * sv
        - a * a * b * n_terms
    )
    return m2, m3


def omega_experiment(
    N: int,
    h: int,
    R: int,
    rho: float,
    C: float,
    tables: ArithTables,
    *,
    backend: str | None = None,
) -> OmegaExperiment:
    """Centered moments m1, m2, m3 over n in [N+1, 2N] with A = sqrt(h log N).

    Requires A < h (the centering shifts must be smaller than the window),
    and tables through 2N + h.  The direct sums and the power-sum
    rearrangements are both computed; their residuals certify the identity
    at float precision (exactness is checked separately on rational data).
    """
    if N < 2 or h < 1:
        raise ValueError(f"need N >= 2 and h >= 1, got N={N}, h={h}")
    A = math.sqrt(h * math.log(N))
    if not A < h:
        raise ValueError(
            f"precondition A < h violated: A = sqrt(h log N) = {A:.3f}, h = {h}"
        )
    start = N + 1
    n_top = 2 * N + h
    if n_top > tables.n_max:
        raise ValueError(f"need tables up to {n_top}, have n_max={tables.n_max}")
    weights = build_weights(R)
    _, U = _lam_windows_float(N, h, weights, start, backend)
    V = _psi_windows(N, h, tables, start)

    a = h + C * A
    b = h + rho * A
    X = U - a
    Y = V - b
    m1 = float(np.sum(Y))
    m2 = float(X @ Y)
    m3 = float((X * X) @ Y)

    su = float(np.sum(U))
    sv = float(np.sum(V))
    su2 = float(U @ U)
    suv = float(U @ V)
    su2v = float((U * U) @ V)
    exp_m2, exp_m3 = omega_expansions(su, sv, su2, suv, su2v, a, b, N)

    predicted_m3 = float(
        -N
        * h**1.5
        * math.sqrt(math.log(N))
        * (rho * C * C * math.log(N) + (2.0 * C + rho) * math.log(R / h))
    )
    return OmegaExperiment(
        N=N,
        h=h,
        R=R,
        rho=rho,
        C=C,
        A=A,
        m1=m1,
        m2=m2,
        m3=m3,
        expansion_m2=exp_m2,
        expansion_m3=exp_m3,
        identity_residual_2=abs(exp_m2 - m2) / max(1.0, abs(m2)),
        identity_residual_3=abs(exp_m3 - m3) / max(1.0, abs(m3)),
        predicted_m3=predicted_m3,
    )
