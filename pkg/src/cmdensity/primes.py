"""Prime tables split by residue mod 4, psi_k(t; 3, 4), and Euler-type constants.

The constants gamma_n(a, q) are computed by Euler-Maclaurin summation in
multiprecision arithmetic, together with an explicit bound on the remainder.
"""
from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import mpmath
import numpy as np

__all__ = [
    "PrimeTable",
    "EulerConstant",
    "EulerConstantsTable",
    "sieve",
    "primes_up_to",
    "load_or_sieve",
    "write_cache",
    "read_cache",
    "psi_k",
    "prime_power_jumps",
    "stieltjes_gamma",
    "gen_euler_gamma",
    "gen_euler_gamma_bound",
    "gamma_chi4",
    "euler_constants_table",
    "MAX_SIEVE_LIMIT",
    "MAX_GAMMA_INDEX",
    "CACHE_ENV",
]

MAX_SIEVE_LIMIT = 10**9
MAX_GAMMA_INDEX = 20
CACHE_ENV = "CMDENSITY_PRIME_CACHE"
_SEGMENT = 1 << 21


def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array, by a segmented odd-only sieve."""
    if limit > MAX_SIEVE_LIMIT:
        raise OverflowError(f"sieve limit {limit} exceeds {MAX_SIEVE_LIMIT}")
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    root = math.isqrt(limit)
    base = np.ones(root + 1, dtype=bool)
    base[:2] = False
    for i in range(2, math.isqrt(root) + 1):
        if base[i]:
            base[i * i :: i] = False
    small = np.flatnonzero(base)[1:]  # odd base primes
    chunks = [np.array([2], dtype=np.int64)]
    # segment over odd numbers n = lo + 2*idx
    lo = 3
    while lo <= limit:
        hi = min(lo + 2 * _SEGMENT, limit + 1)
        count = (hi - lo + 1) // 2
        seg = np.ones(count, dtype=bool)
        for p in small:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            seg[(start - lo) // 2 :: p] = False
        chunks.append(lo + 2 * np.flatnonzero(seg).astype(np.int64))
        lo += 2 * count
    out = np.concatenate(chunks)
    return out[out <= limit]


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes_1mod4: np.ndarray
    primes_3mod4: np.ndarray

    @property
    def count(self) -> int:
        return 1 + len(self.primes_1mod4) + len(self.primes_3mod4) if self.limit >= 2 else 0

    def all_primes(self) -> np.ndarray:
        if self.limit < 2:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate(([2], np.sort(np.concatenate((self.primes_1mod4, self.primes_3mod4)))))

    def require(self, x: float) -> None:
        if x > self.limit:
            raise OverflowError(f"prime table up to {self.limit} does not cover {x:.6g}")


def _split(limit: int, ps: np.ndarray) -> PrimeTable:
    ps = ps.astype(np.int64)
    p1 = ps[ps % 4 == 1]
    p3 = ps[ps % 4 == 3]
    p1.setflags(write=False)
    p3.setflags(write=False)
    return PrimeTable(limit, p1, p3)


@lru_cache(maxsize=8)
def sieve(limit: int) -> PrimeTable:
    return _split(limit, primes_up_to(limit))


# --- binary cache --------------------------------------------------------------
# header: 8-byte magic, u32 version, u32 reserved, u64 limit, u64 count (little endian)
# body:   count u64 deltas, first delta measured from 0
_MAGIC = b"CMDPRIME"
_VERSION = 1
_HEADER = struct.Struct("<8sIIQQ")


def write_cache(path: str | os.PathLike, table: PrimeTable) -> None:
    ps = table.all_primes().astype("<u8")
    deltas = np.diff(ps, prepend=np.uint64(0)).astype("<u8")
    tmp = Path(str(path) + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, 0, table.limit, len(ps)))
        fh.write(deltas.tobytes())
    os.replace(tmp, path)


def read_cache(path: str | os.PathLike) -> PrimeTable:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated prime cache")
    magic, version, _, limit, count = _HEADER.unpack_from(raw)
    if magic != _MAGIC or version != _VERSION:
        raise ValueError(f"{path}: not a version-{_VERSION} prime cache")
    body = np.frombuffer(raw, dtype="<u8", offset=_HEADER.size)
    if len(body) != count:
        raise ValueError(f"{path}: expected {count} deltas, found {len(body)}")
    return _split(limit, np.cumsum(body).astype(np.int64))


def load_or_sieve(limit: int) -> PrimeTable:
    """Sieve, going through the on-disk cache directory named by $CMDENSITY_PRIME_CACHE if set."""
    cache_dir = os.environ.get(CACHE_ENV)
    if not cache_dir:
        return sieve(limit)
    path = Path(cache_dir) / f"primes_{limit}.bin"
    if path.exists():
        try:
            table = read_cache(path)
            if table.limit == limit:
                return table
        except ValueError:
            pass
    table = sieve(limit)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_cache(path, table)
    return table


# --- psi_k ---------------------------------------------------------------------

def _max_exponents(ps: np.ndarray, t: int) -> np.ndarray:
    """Largest n with p**n <= t, exactly, for each p <= t."""
    ns = np.ones(len(ps), dtype=np.int64)
    small = np.flatnonzero(ps.astype(np.float64) ** 2 <= t * (1 + 1e-9))
    for i in small:
        p, n, pw = int(ps[i]), 1, int(ps[i])
        while pw * p <= t:
            pw *= p
            n += 1
        ns[i] = n
    return ns


def psi_k(t: float, k: int, table: PrimeTable) -> float:
    """(-1)^k sum over p^n <= t, p = 3 mod 4, of (-1)^(kn) log p."""
    table.require(t)
    t = int(math.floor(t))
    ps = table.primes_3mod4[: np.searchsorted(table.primes_3mod4, t, side="right")]
    if len(ps) == 0:
        return 0.0
    ns = _max_exponents(ps, t)
    logs = np.log(ps.astype(np.float64))
    if k % 2 == 0:
        weights = ns.astype(np.float64)
    else:
        # -(sum_{n<=N} (-1)^n) is 1 for odd N and 0 for even N
        weights = (ns % 2).astype(np.float64)
    return math.fsum(weights * logs)


def prime_power_jumps(T: float, k: int, table: PrimeTable) -> tuple[np.ndarray, np.ndarray]:
    """Jump locations q = p^n <= T and jump sizes of psi_k(.; 3, 4), sorted by q."""
    table.require(T)
    T = int(math.floor(T))
    ps = table.primes_3mod4[: np.searchsorted(table.primes_3mod4, T, side="right")]
    locs, sizes = [], []
    sign_k = -1.0 if k % 2 else 1.0
    ns = _max_exponents(ps, T) if len(ps) else np.zeros(0, dtype=np.int64)
    for n in range(1, int(ns.max()) + 1 if len(ns) else 1):
        sel = ps[ns >= n]
        locs.append(sel.astype(np.float64) ** n)
        s = sign_k * (sign_k**n)
        sizes.append(s * np.log(sel.astype(np.float64)))
    if not locs:
        return np.zeros(0), np.zeros(0)
    q = np.concatenate(locs)
    j = np.concatenate(sizes)
    order = np.argsort(q, kind="stable")
    return q[order], j[order]


# --- Euler constants -----------------------------------------------------------

@dataclass(frozen=True)
class EulerConstant:
    value: float
    tail_bound: float


_DPS = 45


def _poly_chain(n: int, order: int) -> list[list[int]]:
    """Integer coefficient lists of P_r with (d/dx)^r (log x)^n / x = x^(-1-r) P_r(log x)."""
    polys = [[0] * n + [1]]
    for r in range(order):
        p = polys[-1]
        deriv = [i * p[i] for i in range(1, len(p))] + [0]
        polys.append([deriv[i] - (r + 1) * p[i] for i in range(len(p))])
    return polys


def _poly_eval(coeffs, x):
    acc = mpmath.mpf(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _abs_poly_tail_integral(coeffs, s, U):
    """Upper bound for the integral of |P(u)| e^(-s u) over u >= U."""
    total = mpmath.mpf(0)
    for i, c in enumerate(coeffs):
        if c:
            total += abs(c) * mpmath.gammainc(i + 1, s * U) / mpmath.mpf(s) ** (i + 1)
    return total


@lru_cache(maxsize=None)
def _euler_maclaurin(n: int, a: int, q: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    if not 0 <= n <= MAX_GAMMA_INDEX:
        raise ValueError(f"n={n} outside [0, {MAX_GAMMA_INDEX}]")
    if not 1 <= a <= q:
        raise ValueError(f"residue a={a} outside [1, {q}]")
    with mpmath.workdps(_DPS):
        J = max(64, (600 + q - 1) // q)
        orders = 24
        polys = _poly_chain(n, 2 * orders + 1)
        head = mpmath.fsum(
            mpmath.log(m) ** n / m for m in (mpmath.mpf(a + q * j) for j in range(J))
        )
        x = mpmath.mpf(a + q * J)
        L = mpmath.log(x)
        total = head - L ** (n + 1) / (q * (n + 1)) + L**n / x / 2
        best = None
        prev = mpmath.inf
        for kk in range(1, orders + 1):
            r = 2 * kk - 1
            term = mpmath.bernoulli(2 * kk) / mpmath.factorial(2 * kk) * mpmath.mpf(q) ** r \
                * _poly_eval(polys[r], L) / x ** (r + 1)
            if abs(term) > prev:
                break
            total -= term
            prev = abs(term)
            # remainder after corrections through order 2kk
            s = 2 * kk + 1
            integral = _abs_poly_tail_integral(polys[2 * kk], s, L)
            bound = 2 * mpmath.zeta(2 * kk) / (2 * mpmath.pi) ** (2 * kk) \
                * mpmath.mpf(q) ** (2 * kk - 1) * integral
            best = (+total, bound)
            if bound < mpmath.mpf(10) ** -30:
                break
        return best


def gen_euler_gamma(n: int, a: int, q: int = 4) -> float:
    """gamma_n(a, q): constant term of sum_{m = a mod q, m <= x} (log m)^n/m minus the log main term."""
    return float(_euler_maclaurin(n, a, q)[0])


def gen_euler_gamma_bound(n: int, a: int, q: int = 4) -> EulerConstant:
    v, b = _euler_maclaurin(n, a, q)
    return EulerConstant(float(v), float(b))


def stieltjes_gamma(n: int) -> float:
    """The Stieltjes constant gamma_n."""
    return float(_euler_maclaurin(n, 1, 1)[0])


def gamma_chi4(n: int) -> float:
    """gamma_n(chi_4) = gamma_n(1, 4) - gamma_n(3, 4), kept in full precision until the end."""
    return float(_euler_maclaurin(n, 1, 4)[0] - _euler_maclaurin(n, 3, 4)[0])


@dataclass(frozen=True)
class EulerConstantsTable:
    J: int
    gamma: tuple[float, ...]
    gamma_a4: tuple[dict[int, float], ...]
    gamma_chi4: tuple[float, ...]
    tail_bound: float

    @classmethod
    def build(cls, J: int) -> "EulerConstantsTable":
        return euler_constants_table(J)


@lru_cache(maxsize=None)
def euler_constants_table(J: int) -> EulerConstantsTable:
    if not 0 <= J <= MAX_GAMMA_INDEX:
        raise ValueError(f"J={J} outside [0, {MAX_GAMMA_INDEX}]")
    gam, ga4, gchi, bound = [], [], [], 0.0
    for n in range(J + 1):
        g, b = _euler_maclaurin(n, 1, 1)
        gam.append(float(g))
        bound = max(bound, float(b))
        row = {}
        for a in (1, 2, 3, 4):
            v, b = _euler_maclaurin(n, a, 4)
            row[a] = float(v)
            bound = max(bound, float(b))
        ga4.append(row)
        gchi.append(gamma_chi4(n))
    return EulerConstantsTable(J, tuple(gam), tuple(ga4), tuple(gchi), bound)
