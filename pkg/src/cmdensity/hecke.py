"""The Hecke characters xi_{d,k} attached to y^2 = x^3 - d x.

Conductors, finite parts, split-prime angles and the point-count cross-check.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .zi_core import (
    FourthRoot,
    GaussianInt,
    char_four,
    char_two,
    char_two_plus_two_i,
    is_squarefree,
    primary_generator,
    quartic_symbol_odd,
    quartic_symbol_prime,
    split_rational_prime,
)

__all__ = [
    "HeckeCharacter",
    "SplitPrimeRecord",
    "validate_d",
    "conductor",
    "xi_fin",
    "xi_fin_k",
    "eta",
    "eta_modulus",
    "split_prime_record",
    "angle_table",
    "xi_k_trace",
    "a_p_hecke",
    "a_p_count",
    "POINT_COUNT_CUTOFF",
]

POINT_COUNT_CUTOFF = 10_000


def validate_d(d: int) -> int:
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool):
        raise TypeError(f"d must be an integer, got {type(d).__name__}")
    d = int(d)
    if d % 2 == 0 or not is_squarefree(d):
        raise ValueError(f"d={d} must be odd and square-free")
    return d


def _validate_k(k: int) -> int:
    k = int(k)
    if k < 1:
        raise ValueError(f"k={k} must be a positive integer")
    return k


def conductor(d: int, k: int) -> tuple[GaussianInt, int]:
    """Generator and norm of the conductor of xi_{d,k}."""
    d, k = validate_d(d), _validate_k(k)
    if k % 2 == 1:
        g = GaussianInt(2, 2) * d if d % 4 == 1 else GaussianInt(4 * d)
    elif k % 4 == 2:
        g = GaussianInt(2 * d)
    else:
        g = GaussianInt(1)
    return g, g.norm()


@dataclass(frozen=True)
class HeckeCharacter:
    d: int
    k: int
    alpha: int = field(init=False)
    conductor_generator: GaussianInt = field(init=False)
    conductor_norm: int = field(init=False)

    def __post_init__(self):
        g, n = conductor(self.d, self.k)
        object.__setattr__(self, "alpha", self.k % 8)
        object.__setattr__(self, "conductor_generator", g)
        object.__setattr__(self, "conductor_norm", n)

    @property
    def M(self) -> float:
        return math.sqrt(self.conductor_norm)

    @property
    def log_kM(self) -> float:
        """log(k M), half the log of the analytic conductor."""
        return math.log(self.k) + 0.5 * math.log(self.conductor_norm)


def _coprime_to_2d(x: GaussianInt, d: int) -> bool:
    n = x.norm()
    return n % 2 == 1 and math.gcd(n, d) == 1


def _chi_d(d: int, x: GaussianInt) -> FourthRoot:
    # chi_(d)(x) = (x/|d|)_4 ; the ideal (d) ignores sign
    if abs(d) == 1:
        return FourthRoot.ONE
    return quartic_symbol_odd(x, abs(d))


def xi_fin(d: int, x) -> FourthRoot:
    """Finite part of xi_d at x, or ZERO when x is not coprime to 2d."""
    d = validate_d(d)
    x = GaussianInt.of(x)
    if not _coprime_to_2d(x, d):
        return FourthRoot.ZERO
    cd = _chi_d(d, x).conj()
    r = d % 8
    if r == 1:
        return cd * char_two_plus_two_i(x)
    if r == 3:
        return cd * char_two(x) * char_four(x).conj()
    if r == 5:
        return cd * char_two_plus_two_i(x) * char_two(x)
    return cd * char_four(x).conj()


def eta_modulus(d: int, k: int) -> GaussianInt:
    """The 2-part g of the conductor for k not divisible by 4."""
    if k % 4 == 2:
        return GaussianInt(2)
    if k % 4 == 0:
        return GaussianInt(1)
    return GaussianInt(2, 2) if d % 4 == 1 else GaussianInt(4)


def eta(d: int, k: int, x) -> FourthRoot:
    """The 2-adic factor of the finite part of xi_{d,k} (trivial when 4 | k)."""
    x = GaussianInt.of(x)
    if k % 4 == 0:
        return FourthRoot.ONE if x.norm() % 2 else FourthRoot.ZERO
    if k % 4 == 2:
        return char_two(x)
    r = d % 8
    if r == 1:
        return char_two_plus_two_i(x) ** k
    if r == 5:
        return char_two_plus_two_i(x) ** k * char_two(x)
    if r == 3:
        return char_four(x).conj() ** k * char_two(x)
    return char_four(x).conj() ** k


def xi_fin_k(d: int, k: int, x) -> FourthRoot:
    """Finite part of the primitive character xi_{d,k}: conj(chi_(d))^k * eta_{d,k}."""
    d, k = validate_d(d), _validate_k(k)
    x = GaussianInt.of(x)
    if k % 4 == 0:
        return FourthRoot.ONE if x.norm() else FourthRoot.ZERO
    if not _coprime_to_2d(x, d):
        return FourthRoot.ZERO
    return _chi_d(d, x).conj() ** k * eta(d, k, x)


@dataclass(frozen=True)
class SplitPrimeRecord:
    p: int
    bold_pi: GaussianInt
    chi_p_d: FourthRoot
    theta: float
    z: GaussianInt

    @property
    def two_cos_theta(self) -> float:
        return 2.0 * math.cos(self.theta)


def _check_split(p: int) -> None:
    if p % 4 != 1:
        raise ValueError(f"p={p} is not 1 mod 4")


@lru_cache(maxsize=200_000)
def split_prime_record(d: int, p: int) -> SplitPrimeRecord:
    """Angle data of xi_d at the prime above p lying in the upper half plane.

    The lattice point ``z`` equals sqrt(p) * xi_d(P) exactly; of the two primes
    above p we keep the one whose ``z`` has positive imaginary part, which is the
    fold of the argument into (0, pi).
    """
    d = validate_d(d)
    _check_split(p)
    if d % p == 0:
        raise ValueError(f"p={p} divides d={d}")
    base = split_rational_prime(p)
    for cand in (base, base.conj()):
        bold = primary_generator(cand)
        chi = quartic_symbol_prime(d, cand)
        w = bold * chi.conj().as_gaussian()
        if w.im > 0:
            break
    else:  # pragma: no cover - impossible: Im(w) and Im(conj w) have opposite signs
        raise ArithmeticError(f"degenerate angle for d={d}, p={p}")
    theta = math.atan2(w.im, w.re)
    approx = math.sqrt(p) * cmath.exp(1j * theta)
    z = GaussianInt(round(approx.real), round(approx.imag))
    if abs(complex(z) - approx) >= 1e-6 or z != w:
        raise ArithmeticError(f"angle for d={d}, p={p} does not land on a lattice point")
    return SplitPrimeRecord(p=p, bold_pi=bold, chi_p_d=chi, theta=theta, z=z)


def split_generator_angle(p: int) -> float:
    """Angle in (0, pi) of a generator of a prime above p, for p | d and 4 | k."""
    _check_split(p)
    g = split_rational_prime(p)
    if g.im < 0:
        g = g.conj()
    return math.atan2(g.im, g.re)


def angle_table(d: int, primes) -> np.ndarray:
    """theta_{d,p} for an ascending array of primes p = 1 mod 4 not dividing d."""
    return np.array([split_prime_record(d, int(p)).theta for p in primes], dtype=float)


def xi_k_trace(record: SplitPrimeRecord, k: int) -> float:
    """xi_{d,k}(P) + xi_{d,k}(conj P) = 2 cos(k theta)."""
    return 2.0 * math.cos(k * record.theta)


def a_p_hecke(d: int, p: int) -> int:
    d = validate_d(d)
    if p == 2 or d % p == 0:
        raise ValueError(f"p={p} divides 2d")
    if p % 4 == 3:
        return 0
    return 2 * split_prime_record(d, p).z.re


def _legendre_table(p: int) -> np.ndarray:
    """chi(r) for r in [0, p) as int8, via the set of squares."""
    table = np.full(p, -1, dtype=np.int8)
    sq = (np.arange(p, dtype=np.int64) ** 2) % p
    table[sq] = 1
    table[0] = 0
    return table


def a_p_count(d: int, p: int, cutoff: int = POINT_COUNT_CUTOFF) -> int:
    """p + 1 - #E_d(F_p) by summing Legendre symbols of x^3 - d x."""
    d = validate_d(d)
    if p > cutoff:
        raise OverflowError(f"p={p} exceeds the point-count cutoff {cutoff}")
    if p == 2 or d % p == 0:
        raise ValueError(f"p={p} divides 2d")
    x = np.arange(p, dtype=np.int64)
    vals = (x * x % p * x - (d % p) * x) % p
    return -int(_legendre_table(p)[vals].astype(np.int64).sum())
