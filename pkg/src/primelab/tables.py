"""Sieved arithmetic tables: spf, mu, phi, Lambda, d(n), psi prefix sums.

One pass of a linear (Euler) sieve produces, for all n <= n_max:

* ``spf``       smallest prime factor (int32; spf[1] = 1),
* ``mu``        Moebius function (int8),
* ``phi``       Euler totient (int64),
* ``num_div``   divisor count d(n) (int32),

plus the von Mangoldt function ``lam`` (float64; log p at prime powers) and
its compensated prefix sums ``psi_prefix`` with psi_prefix[x] = psi(x).

Memory is about 33-34 bytes per entry (4+1+8+4+8+8), so n_max = 10**7
costs ~330 MB; ``build_tables`` refuses requests that cannot fit int32
smallest-prime-factor storage.

The numba backend runs the classic linear sieve; the numpy backend builds
the same tables with slice-based sieves (identical integer content; the
float arrays agree to rounding).  Tables can be saved to / loaded from a
small versioned binary format for reuse across processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
import os
import struct

import numpy as np

from ._backend import njit, resolve_backend

_MAGIC = b"PRLB"
_FORMAT_VERSION = 1

#: environment variable naming the directory for cached table files
CACHE_DIR_ENV = "PRIMELAB_CACHE_DIR"


@dataclass
class ArithTables:
    """Container for the sieved arrays; index n is the integer n itself."""

    n_max: int
    spf: np.ndarray  # int32  smallest prime factor, spf[0]=0, spf[1]=1
    mu: np.ndarray  # int8   Moebius
    phi: np.ndarray  # int64  totient
    lam: np.ndarray  # float64 von Mangoldt Lambda(n)
    num_div: np.ndarray  # int32 divisor count
    psi_prefix: np.ndarray  # float64, psi_prefix[x] = sum_{n<=x} Lambda(n)
    _lam_base: np.ndarray | None = field(default=None, repr=False)

    def psi(self, x: int) -> float:
        """psi(x) = sum_{n <= x} Lambda(n) straight from the prefix array."""
        if not 0 <= x <= self.n_max:
            raise ValueError(f"x={x} outside table range [0, {self.n_max}]")
        return float(self.psi_prefix[x])

    def factor(self, n: int) -> list[tuple[int, int]]:
        """Factor 2 <= n <= n_max into [(p, e), ...] by walking spf."""
        if not 2 <= n <= self.n_max:
            raise ValueError(f"n={n} outside table range [2, {self.n_max}]")
        out: list[tuple[int, int]] = []
        while n > 1:
            p = int(self.spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def lam_exact(self, n: int) -> tuple[int, int] | None:
        """Exact Lambda: (p, e) if n = p**e (so Lambda(n) = log p), else None."""
        if not 1 <= n <= self.n_max:
            raise ValueError(f"n={n} outside table range [1, {self.n_max}]")
        if n == 1:
            return None
        p = int(self.spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        return (p, e) if n == 1 else None

    def lam_base_array(self) -> np.ndarray:
        """int32 array with p at prime powers p**e and 0 elsewhere (cached).

        This is the exact integer skeleton of ``lam``: Lambda(n) = log(base[n])
        whenever base[n] > 0.
        """
        if self._lam_base is None:
            n = self.n_max
            base = np.zeros(n + 1, dtype=np.int32)
            q = np.arange(n + 1, dtype=np.int64)
            q[:2] = 1
            p = self.spf.astype(np.int64, copy=True)
            p[:2] = 1
            # strip the smallest prime factor completely; prime powers end at 1
            active = q > 1
            while np.any(active):
                div = (q % p == 0) & active
                q[div] //= p[div]
                active = div & (q > 1)
            is_pp = (q == 1) & (np.arange(n + 1) >= 2)
            base[is_pp] = self.spf[is_pp]
            self._lam_base = base
        return self._lam_base


# ---------------------------------------------------------------------------
# numba backend: linear sieve + Kahan prefix
# ---------------------------------------------------------------------------


@njit(cache=True)
def _sieve_kernel(n):  # pragma: no cover - compiled
    spf = np.zeros(n + 1, dtype=np.int32)
    mu = np.zeros(n + 1, dtype=np.int8)
    phi = np.zeros(n + 1, dtype=np.int64)
    nd = np.zeros(n + 1, dtype=np.int32)
    ecnt = np.zeros(n + 1, dtype=np.int8)  # exponent of spf[i] in i
    spf[1] = 1
    mu[1] = 1
    phi[1] = 1
    nd[1] = 1
    nprimes = int(1.3 * n / np.log(n + 2)) + 32
    primes = np.empty(nprimes, dtype=np.int64)
    cnt = 0
    for i in range(2, n + 1):
        if spf[i] == 0:
            spf[i] = i
            mu[i] = -1
            phi[i] = i - 1
            nd[i] = 2
            ecnt[i] = 1
            primes[cnt] = i
            cnt += 1
        for j in range(cnt):
            p = primes[j]
            ip = i * p
            if p > spf[i] or ip > n:
                break
            spf[ip] = p
            if p == spf[i]:
                mu[ip] = 0
                phi[ip] = phi[i] * p
                ecnt[ip] = ecnt[i] + 1
                nd[ip] = nd[i] // (ecnt[i] + 1) * (ecnt[i] + 2)
                break
            else:
                mu[ip] = -mu[i]
                phi[ip] = phi[i] * (p - 1)
                ecnt[ip] = 1
                nd[ip] = nd[i] * 2
    return spf, mu, phi, nd, primes[:cnt]


@njit(cache=True)
def _lam_psi_kernel(n, primes):  # pragma: no cover - compiled
    lam = np.zeros(n + 1, dtype=np.float64)
    for j in range(primes.size):
        p = primes[j]
        lp = np.log(np.float64(p))
        q = p
        while q <= n:
            lam[q] = lp
            q *= p
    psi = np.zeros(n + 1, dtype=np.float64)
    s = 0.0
    c = 0.0  # Kahan compensation
    for i in range(1, n + 1):
        y = lam[i] - c
        t = s + y
        c = (t - s) - y
        s = t
        psi[i] = s
    return lam, psi


# ---------------------------------------------------------------------------
# numpy backend: slice sieves
# ---------------------------------------------------------------------------


def _sieve_numpy(n: int):
    spf = np.zeros(n + 1, dtype=np.int32)
    spf[1] = 1
    for i in range(2, math.isqrt(n) + 1):
        if spf[i] == 0:
            spf[i] = i
            sl = spf[i * i :: i]
            sl[sl == 0] = i
    rest = np.flatnonzero(spf == 0)
    rest = rest[rest >= 2]
    spf[rest] = rest.astype(np.int32)

    idx = np.arange(n + 1, dtype=np.int64)
    primes = np.flatnonzero(spf == idx)
    primes = primes[primes >= 2]

    mu = np.ones(n + 1, dtype=np.int8)
    phi = idx.copy()
    nd = np.ones(n + 1, dtype=np.int32)
    for p in primes:
        p = int(p)
        mu[p::p] *= -1
        phi[p::p] //= p
        phi[p::p] *= p - 1
        nd[p::p] *= 2
        if p * p <= n:
            mu[p * p :: p * p] = 0
            e = 2
            q = p * p
            while q <= n:
                nd[q::q] //= e
                nd[q::q] *= e + 1
                e += 1
                q *= p
    mu[0] = 0
    phi[0] = 0
    nd[0] = 0
    phi[1] = 1
    return spf, mu, phi, nd, primes


def _lam_psi_numpy(n: int, primes: np.ndarray):
    lam = np.zeros(n + 1, dtype=np.float64)
    lam[primes] = np.log(primes.astype(np.float64))
    for p in primes[primes <= math.isqrt(n)]:
        p = int(p)
        lp = math.log(p)
        q = p * p
        while q <= n:
            lam[q] = lp
            q *= p
    # compensated prefix: accumulate in extended precision, then round once
    psi = np.cumsum(lam.astype(np.longdouble)).astype(np.float64)
    return lam, psi


def build_tables(n_max: int, backend: str | None = None) -> ArithTables:
    """Sieve all tables up to n_max (inclusive).

    Requires n_max >= 2.  Memory is ~34 bytes/entry; n_max beyond int32
    range is refused since spf is stored as int32.
    """
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    if n_max > 2**31 - 2:
        raise ValueError(f"n_max={n_max} exceeds int32 spf capacity")
    if resolve_backend(backend) == "numba":
        spf, mu, phi, nd, primes = _sieve_kernel(n_max)
        lam, psi = _lam_psi_kernel(n_max, primes)
    else:
        spf, mu, phi, nd, primes = _sieve_numpy(n_max)
        lam, psi = _lam_psi_numpy(n_max, primes)
    return ArithTables(
        n_max=n_max, spf=spf, mu=mu, phi=phi, lam=lam, num_div=nd, psi_prefix=psi
    )


# ---------------------------------------------------------------------------
# binary cache
# ---------------------------------------------------------------------------

_ARRAY_SPEC = (
    ("spf", "<i4"),
    ("mu", "<i1"),
    ("phi", "<i8"),
    ("lam", "<f8"),
    ("num_div", "<i4"),
    ("psi_prefix", "<f8"),
)


def save_tables(tables: ArithTables, path: str | os.PathLike) -> None:
    """Write tables to a little-endian binary file (magic, version, n_max, arrays)."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<HQ", _FORMAT_VERSION, tables.n_max))
        for name, dt in _ARRAY_SPEC:
            arr = getattr(tables, name)
            fh.write(np.ascontiguousarray(arr, dtype=dt).tobytes())


def load_tables(path: str | os.PathLike) -> ArithTables:
    """Read tables written by save_tables; validates magic and version."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError(f"not a primelab table file (magic {magic!r})")
        version, n_max = struct.unpack("<HQ", fh.read(10))
        if version != _FORMAT_VERSION:
            raise ValueError(f"unsupported table format version {version}")
        n_max = int(n_max)
        arrays = {}
        for name, dt in _ARRAY_SPEC:
            dtype = np.dtype(dt)
            buf = fh.read(dtype.itemsize * (n_max + 1))
            if len(buf) != dtype.itemsize * (n_max + 1):
                raise ValueError("truncated table file")
            arrays[name] = np.frombuffer(buf, dtype=dtype).copy()
    return ArithTables(n_max=n_max, **arrays)


def cache_path(n_max: int) -> str:
    """Default cache file location, honoring the PRIMELAB_CACHE_DIR variable."""
    base = os.environ.get(CACHE_DIR_ENV, ".")
    return os.path.join(base, f"primelab_tables_{n_max}.bin")


# ---------------------------------------------------------------------------
# scalar number theory on top of the tables
# ---------------------------------------------------------------------------


def gcd_or_zero(a: int, b: int) -> int:
    """gcd variant with (0, a) = (a, 0) = 0.

    Some identity statements use this convention for shift arguments; the
    implemented closed forms all use the standard gcd (gcd(0, a) = |a|),
    so this wrapper exists only for spot-checking the alternate reading.
    """
    if a == 0 or b == 0:
        return 0
    return math.gcd(a, b)


def _factor_generic(n: int, tables: ArithTables | None) -> list[tuple[int, int]]:
    if tables is not None and n <= tables.n_max:
        return tables.factor(n)
    from sympy import factorint  # lazy: only needed beyond table range

    return sorted((int(p), int(e)) for p, e in factorint(n).items())


def phi2(n: int, tables: ArithTables | None = None) -> int:
    """phi_2(n) = prod_{p | n} (p - 2) for squarefree n; phi_2(1) = 1.

    Raises ValueError off the squarefree domain.  Note phi_2(2) = 0.
    """
    if n < 1:
        raise ValueError(f"phi2 requires n >= 1, got {n}")
    if n == 1:
        return 1
    out = 1
    for p, e in _factor_generic(n, tables):
        if e > 1:
            raise ValueError(f"phi2 domain is squarefree n; {n} is divisible by {p}^2")
        out *= p - 2
    return out


@dataclass(frozen=True)
class SquarefreeKernel:
    """Largest squarefree divisor j* of j, with the computation source."""

    value: int
    source: str  # "tables" or "factorization"


def squarefree_kernel(j: int, tables: ArithTables | None = None) -> SquarefreeKernel:
    """j* = prod_{p | j} p for j != 0; the sign of j is ignored.

    Raises ValueError at j = 0 (every prime divides 0, so j* is undefined).
    """
    if j == 0:
        raise ValueError("squarefree kernel undefined at j = 0")
    j = abs(j)
    if j == 1:
        return SquarefreeKernel(1, "tables" if tables is not None else "factorization")
    use_tables = tables is not None and j <= tables.n_max
    val = 1
    for p, _e in _factor_generic(j, tables if use_tables else None):
        val *= p
    return SquarefreeKernel(val, "tables" if use_tables else "factorization")


# ---------------------------------------------------------------------------
# arithmetic progressions
# ---------------------------------------------------------------------------


def psi_ap(x: int, q: int, a: int, tables: ArithTables) -> float:
    """psi(x; q, a) = sum_{n <= x, n = a (mod q)} Lambda(n)."""
    if q < 1:
        raise ValueError(f"modulus q must be >= 1, got {q}")
    if not 0 <= x <= tables.n_max:
        raise ValueError(f"x={x} outside table range [0, {tables.n_max}]")
    a = a % q
    start = a if a >= 1 else q
    if start > x:
        return 0.0
    return math.fsum(tables.lam[start : x + 1 : q].tolist())


def error_in_ap(x: int, q: int, a: int, tables: ArithTables) -> float:
    """E(x; q, a) = psi(x; q, a) - [gcd(a,q)=1] * x / phi(q)."""
    main = x / _phi_scalar(q, tables) if math.gcd(a, q) == 1 else 0.0
    return psi_ap(x, q, a, tables) - main


def _phi_scalar(q: int, tables: ArithTables) -> int:
    if q <= tables.n_max:
        return int(tables.phi[q])
    out = q
    for p, _e in _factor_generic(q, tables):
        out = out // p * (p - 1)
    return out


@njit(cache=True)
def _gcd_jit(a, b):  # pragma: no cover - compiled
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def _bv_kernel(lam, x, qmax, phis):  # pragma: no cover - compiled
    total = 0.0
    for q in range(1, qmax + 1):
        sums = np.zeros(q, dtype=np.float64)
        for m in range(1, x + 1):
            sums[m % q] += lam[m]
        best = 0.0
        for a in range(q):
            if _gcd_jit(a, q) == 1:
                e = sums[a] - x / phis[q]
                if abs(e) > best:
                    best = abs(e)
        total += best
    return total


def _bv_numpy(lam: np.ndarray, x: int, qmax: int, phis: np.ndarray) -> float:
    total = 0.0
    vals = lam[1 : x + 1]
    for q in range(1, qmax + 1):
        pad = (-x) % q
        padded = np.concatenate([vals, np.zeros(pad)]) if pad else vals
        # column c of the reshape holds positions c+1, c+1+q, ...: residue (c+1)%q
        sums = padded.reshape(-1, q).sum(axis=0)
        bucket = np.zeros(q)
        for c in range(q):
            bucket[(c + 1) % q] = sums[c]
        a = np.arange(q)
        coprime = np.gcd(a, q) == 1  # gcd(0, 1) = 1 covers the q = 1 case
        e = np.abs(bucket[coprime] - x / phis[q])
        total += float(e.max())
    return total


def bv_sum(x: int, q_max: int, tables: ArithTables, backend: str | None = None) -> float:
    """sum_{q <= q_max} max_{(a,q)=1} |psi(x; q, a) - x/phi(q)|.

    For q_max = 1 this is |psi(x) - x|.  Re-running with the same inputs and
    backend reproduces the value bit-for-bit.
    """
    if not 1 <= q_max:
        raise ValueError(f"q_max must be >= 1, got {q_max}")
    if not 1 <= x <= tables.n_max:
        raise ValueError(f"x={x} outside table range [1, {tables.n_max}]")
    phis = np.zeros(q_max + 1, dtype=np.float64)
    for q in range(1, q_max + 1):
        phis[q] = _phi_scalar(q, tables)
    if resolve_backend(backend) == "numba":
        return float(_bv_kernel(tables.lam, x, q_max, phis))
    return _bv_numpy(tables.lam, x, q_max, phis)
