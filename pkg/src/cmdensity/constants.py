"""Lower-order constants c_j(d, alpha) and C_m(d, alpha, phi).

Every truncated prime sum carries a rigorous remainder bound; downstream
quantities are reported as (value, tail) pairs where the exact number lies in
[value - tail, value].
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .hecke import validate_d
from .primes import (
    PrimeTable,
    euler_constants_table,
    load_or_sieve,
    prime_power_jumps,
)
from .zi_core import factor_int

__all__ = [
    "PolyFraction",
    "Interval",
    "ConstantsReport",
    "polylog_neg",
    "polylog_series",
    "polylog_series_tail",
    "bell_partial",
    "bell_partial_enumerate",
    "log_deriv_zeta_part",
    "log_deriv_L4",
    "B_const",
    "A_const",
    "zeta43_logderiv",
    "c_ram",
    "c_inert_d",
    "c_inert_closed",
    "c_inert_integral",
    "c_total",
    "big_C_m",
    "constants_report",
    "MAX_J",
    "DEFAULT_CUTOFF",
]

MAX_J = 10
DEFAULT_CUTOFF = 10**6
MAX_POLYLOG_ORDER = 30
LOG2 = math.log(2.0)


# --- negative-order polylogarithms -----------------------------------------------

@dataclass(frozen=True)
class PolyFraction:
    """Li_{-j}(z) = P_j(z) / (1 - z)^(j+1) with integer coefficients, lowest degree first."""

    order: int
    coeffs: tuple[int, ...]

    def __call__(self, z):
        num = np.polynomial.polynomial.polyval(z, self.coeffs)
        return num / (1.0 - np.asarray(z)) ** (self.order + 1) if isinstance(z, np.ndarray) \
            else num / (1.0 - z) ** (self.order + 1)


@lru_cache(maxsize=None)
def _polyfraction(j: int) -> PolyFraction:
    if j == 0:
        return PolyFraction(0, (0, 1))
    prev = _polyfraction(j - 1).coeffs
    # z (1 - z) P' + j z P
    deriv = [i * prev[i] for i in range(1, len(prev))]
    out = [0] * (len(prev) + 1)
    for i, c in enumerate(deriv):
        out[i + 1] += c
        out[i + 2] -= c
    for i, c in enumerate(prev):
        out[i + 1] += j * c
    while out and out[-1] == 0:
        out.pop()
    return PolyFraction(j, tuple(out))


def polylog_neg(j: int, z):
    """Li_{-j}(z) = sum n^j z^n for |z| < 1, via its exact rational form."""
    if not 0 <= j <= MAX_POLYLOG_ORDER:
        raise ValueError(f"order j={j} outside [0, {MAX_POLYLOG_ORDER}]")
    if np.any(np.abs(np.asarray(z)) >= 1):
        raise ValueError("polylog_neg needs |z| < 1")
    return _polyfraction(j)(z)


def polylog_series(j: int, z: float, terms: int = 200) -> float:
    """Truncated sum n^j z^n in exact rational arithmetic (z is taken as its binary value)."""
    zf = Fraction(z)
    acc, zn = Fraction(0), Fraction(1)
    for n in range(1, terms + 1):
        zn *= zf
        acc += n**j * zn
    return float(acc)


def polylog_series_tail(j: int, z: float, terms: int = 200) -> float:
    """Bound on the omitted part of ``polylog_series`` (valid once terms exceed j / log(1/|z|))."""
    r = abs(z)
    n = terms + 1
    ratio = r * ((n + 1) / n) ** j
    if ratio >= 1:
        return math.inf
    return n**j * r**n / (1 - ratio)


# --- Bell polynomials --------------------------------------------------------------

def bell_partial(n: int, k: int, xs: Sequence):
    """Partial exponential Bell polynomial B_{n,k}(x_1, ..., x_{n-k+1}) by recurrence.

    Works over any ring of Python numbers (int, Fraction, float, mpf).
    """
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"bad Bell indices n={n}, k={k}")
    if n > 0 and k > 0 and len(xs) < n - k + 1:
        raise ValueError(f"B_{{{n},{k}}} needs {n - k + 1} arguments, got {len(xs)}")
    table: dict[tuple[int, int], object] = {}

    def b(nn: int, kk: int):
        if (nn, kk) in table:
            return table[nn, kk]
        if nn == 0 and kk == 0:
            v = 1
        elif nn == 0 or kk == 0:
            v = 0
        else:
            v = 0
            for i in range(1, nn - kk + 2):
                v = v + math.comb(nn - 1, i - 1) * xs[i - 1] * b(nn - i, kk - 1)
        table[nn, kk] = v
        return v

    return b(n, k)


def _compositions(n: int, k: int, width: int):
    """Tuples (j_1..j_width) >= 0 with sum j = k and sum i*j_i = n."""

    def rec(i, left_k, left_n):
        if i > width:
            if left_k == 0 and left_n == 0:
                yield ()
            return
        for ji in range(0, min(left_k, left_n // i) + 1):
            for rest in rec(i + 1, left_k - ji, left_n - i * ji):
                yield (ji,) + rest

    yield from rec(1, k, n)


def bell_partial_enumerate(n: int, k: int, xs: Sequence):
    """B_{n,k} summed directly over its defining index set (reference implementation)."""
    width = n - k + 1
    total = 0
    for js in _compositions(n, k, width):
        coef = math.factorial(n)
        term = 1
        for i, ji in enumerate(js, start=1):
            coef //= math.factorial(ji)
            term = term * (xs[i - 1] / math.factorial(i) if not isinstance(xs[i - 1], int)
                           else _frac(xs[i - 1], math.factorial(i))) ** ji
        total = total + coef * term
    return total


def _frac(a: int, b: int) -> Fraction:
    return Fraction(a, b)


def _faa_di_bruno_log(j: int, derivs: Sequence[float], value_at_1: float = 1.0) -> float:
    """(log g)^{(j+1)} at a point from g's value and derivatives g', g'', ... there."""
    total = 0.0
    for k in range(1, j + 2):
        total += (-1) ** (k + 1) * math.factorial(k - 1) * value_at_1 ** (-k) \
            * bell_partial(j + 1, k, derivs)
    return total


def log_deriv_zeta_part(j: int) -> float:
    """(f'/f)^{(j)}(1) for f(s) = (s - 1) zeta(s)."""
    if not 0 <= j <= MAX_J:
        raise ValueError(f"j={j} outside [0, {MAX_J}]")
    g = euler_constants_table(j + 1).gamma
    xs = [ell * (-1) ** (ell - 1) * g[ell - 1] for ell in range(1, j + 2)]
    return _faa_di_bruno_log(j, xs)


def log_deriv_L4(j: int) -> float:
    """(L'/L)^{(j)}(1, chi_4), using L^{(n)}(1, chi_4) = (-1)^n gamma_n(chi_4)."""
    if not 0 <= j <= MAX_J:
        raise ValueError(f"j={j} outside [0, {MAX_J}]")
    gc = euler_constants_table(j + 1).gamma_chi4
    ys = [(-1) ** ell * gc[ell] for ell in range(1, j + 2)]
    return _faa_di_bruno_log(j, ys, gc[0])


def B_const(j: int) -> float:
    return (-1) ** j / math.factorial(j) * (log_deriv_zeta_part(j) - log_deriv_L4(j))


def _two_adic(j: int) -> float:
    return LOG2 ** (j + 1) / math.factorial(j) * float(polylog_neg(j, 0.5))


def c_ram(j: int, alpha: int) -> float:
    if alpha % 4:
        return 0.0
    z = (-1) ** ((alpha % 8) // 4) / math.sqrt(2.0)
    return -2.0 / math.factorial(j) * (LOG2 / 2) ** (j + 1) * float(polylog_neg(j, z))


def A_const(j: int) -> float:
    """Prime-2 and archimedean part of c_j(1, 8)."""
    return _two_adic(j) + c_ram(j, 8) - (math.log(2 * math.pi) if j == 0 else 0.0)


# --- the inert Euler product zeta_{4,3} -------------------------------------------

@dataclass(frozen=True)
class Interval:
    """A truncated value whose exact counterpart lies in [value - tail, value] or [value, value + tail]."""

    value: float
    tail: float
    cutoff: float = 0.0

    @property
    def center(self) -> float:
        return self.value

    def as_dict(self) -> dict:
        return {"value": self.value, "tail_bound": self.tail, "cutoff": self.cutoff}


def _tail_bound(j: int, x: float) -> float:
    L = math.log(x)
    s = (L ** (j + 1)) / x**2 + sum(L**k / x * math.factorial(j + 1) / math.factorial(k)
                                   for k in range(j + 2))
    return 2.0 ** (j + 1) / math.factorial(j) * s


def zeta43_logderiv(j: int, x: float = DEFAULT_CUTOFF, table: PrimeTable | None = None) -> Interval:
    """T_j[x] = 2^{j+1}/j! sum_{p = 3 mod 4, p < x} (log p)^{j+1} Li_{-j}(p^-2), with its remainder bound."""
    if x <= math.exp((j + 1) / 2):
        # (log t)^{j+1}/t^2 must be decreasing beyond x for the bound to hold
        raise ValueError(f"cutoff x={x} too small for j={j}")
    table = table or load_or_sieve(int(math.ceil(x)))
    table.require(x - 1)
    ps = table.primes_3mod4
    ps = ps[ps < x].astype(np.float64)
    terms = np.log(ps) ** (j + 1) * polylog_neg(j, 1.0 / ps**2)
    value = 2.0 ** (j + 1) / math.factorial(j) * math.fsum(terms)
    return Interval(value, _tail_bound(j, x), x)


def c_inert_d(j: int, alpha: int, d: int) -> float:
    d = validate_d(d)
    if alpha % 4 == 0:
        return 0.0
    z_sign = -1.0 if alpha % 2 else 1.0
    terms = [math.log(p) ** (j + 1) * float(polylog_neg(j, z_sign / p))
             for p in factor_int(d) if p % 4 == 3] if abs(d) > 1 else []
    return 2.0 / math.factorial(j) * math.fsum(terms)


def c_inert_closed(j: int, alpha: int, x: float = DEFAULT_CUTOFF,
                   table: PrimeTable | None = None) -> Interval:
    """c_{j,inert} from Euler constants, the prime 2 and the zeta_{4,3} sum; exact value in [v - tail, v]."""
    T = zeta43_logderiv(j, x, table)
    sign = -1.0 if alpha % 2 else 1.0
    v = sign * (B_const(j) + _two_adic(j)) - T.value
    return Interval(v, T.tail, x)


def c_inert_integral(j: int, alpha: int, T: float, table: PrimeTable | None = None) -> float:
    """c_{j,inert} from the integral of (psi_k(t) - t/2)/t^2 against its weight, truncated at T.

    Diagnostic only: the truncation error decays slowly in T.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    sign = -1.0 if alpha % 2 else 1.0
    L = math.log(T)
    if T >= 3:
        table = table or load_or_sieve(int(T))
        q, jump = prime_power_jumps(T, alpha, table)
    else:
        q, jump = np.zeros(0), np.zeros(0)

    if j == 0:
        H = lambda t: -1.0 / t  # noqa: E731
        smooth = -0.5 * L
    else:
        fj = math.factorial(j)
        H = lambda t: np.log(t) ** j / (fj * t)  # noqa: E731
        smooth = -0.5 * (L**j / fj - L ** (j + 1) / math.factorial(j + 1))
    integral = math.fsum(jump * (H(T) - H(q))) + smooth if len(q) else smooth
    if j == 0:
        return -sign * (1.0 + 2.0 * integral)
    return 2.0 * sign * integral


def c_total(j: int, d: int, alpha: int, x: float = DEFAULT_CUTOFF,
            table: PrimeTable | None = None) -> Interval:
    """c_j(d, alpha); the exact value lies in [value - tail, value]."""
    inert = c_inert_closed(j, alpha, x, table)
    v = c_ram(j, alpha) + inert.value + c_inert_d(j, alpha, d)
    if j == 0:
        v -= math.log(2 * math.pi)
    return Interval(v, inert.tail, x)


def big_C_m(m: int, d: int, alpha: int, fhat_derivs: Mapping[int, float] | Sequence[float],
            x: float = DEFAULT_CUTOFF, table: PrimeTable | None = None) -> Interval:
    """C_m(d, alpha, phi) = (m-1)! sum_{j even < m} c_j(d, alpha) fhat^{(j)}(0) / j!."""
    if m < 1:
        raise ValueError("m must be at least 1")
    value, tail = 0.0, 0.0
    for j in range(0, m, 2):
        try:
            fj = fhat_derivs[j]
        except (IndexError, KeyError):
            raise ValueError(f"missing fhat derivative of order {j}") from None
        c = c_total(j, d, alpha, x, table)
        w = math.factorial(m - 1) * fj / math.factorial(j)
        value += c.value * w
        tail += c.tail * abs(w)
    return Interval(value, tail, x)


# --- report ----------------------------------------------------------------------

@dataclass
class ConstantsReport:
    d: int
    alpha: int
    J: int
    cutoff: float
    c_ram: list[float] = field(default_factory=list)
    c_inert_d: list[float] = field(default_factory=list)
    c_inert: list[dict] = field(default_factory=list)
    c_total: list[dict] = field(default_factory=list)
    C_m: list[dict] = field(default_factory=list)
    ingredients: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def constants_report(d: int, alpha: int, J: int, x: float = DEFAULT_CUTOFF,
                     fhat_derivs: Sequence[float] | None = None,
                     table: PrimeTable | None = None) -> ConstantsReport:
    d = validate_d(d)
    if not 0 <= J <= MAX_J:
        raise ValueError(f"J={J} outside [0, {MAX_J}]")
    table = table or load_or_sieve(int(math.ceil(x)))
    rep = ConstantsReport(d=d, alpha=alpha % 8 or 8, J=J, cutoff=x)
    ec = euler_constants_table(J + 1)
    for j in range(J + 1):
        rep.c_ram.append(c_ram(j, alpha))
        rep.c_inert_d.append(c_inert_d(j, alpha, d))
        rep.c_inert.append(c_inert_closed(j, alpha, x, table).as_dict())
        rep.c_total.append(c_total(j, d, alpha, x, table).as_dict())
    if fhat_derivs is not None:
        for m in range(1, J + 1):
            rep.C_m.append({"m": m, **big_C_m(m, d, alpha, fhat_derivs, x, table).as_dict()})
    rep.ingredients = {
        "stieltjes": list(ec.gamma),
        "gamma_chi4": list(ec.gamma_chi4),
        "euler_maclaurin_tail_bound": ec.tail_bound,
        "log_deriv_zeta_part": [log_deriv_zeta_part(j) for j in range(J + 1)],
        "log_deriv_L4": [log_deriv_L4(j) for j in range(J + 1)],
        "B": [B_const(j) for j in range(J + 1)],
        "T": [zeta43_logderiv(j, x, table).as_dict() for j in range(J + 1)],
    }
    return rep
