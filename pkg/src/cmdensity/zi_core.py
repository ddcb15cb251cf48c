"""Exact arithmetic in the Gaussian integers Z[i] and the finite characters on it.

Components are Python ints, so there is no fixed-width overflow to guard against.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterator, Union

__all__ = [
    "GaussianInt",
    "FourthRoot",
    "UNITS",
    "norm",
    "euclid_rem",
    "gcd",
    "is_primary",
    "primary_generator",
    "quartic_symbol_prime",
    "quartic_symbol_odd",
    "char_two",
    "char_two_plus_two_i",
    "char_four",
    "split_rational_prime",
    "sqrt_minus_one_mod",
    "factor_int",
    "gaussian_factor",
    "is_squarefree",
]

IntLike = Union[int, "GaussianInt"]


@dataclass(frozen=True, slots=True)
class GaussianInt:
    re: int
    im: int = 0

    @classmethod
    def of(cls, x: IntLike) -> "GaussianInt":
        if isinstance(x, GaussianInt):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        raise TypeError(f"cannot interpret {x!r} as a Gaussian integer")

    def __add__(self, other: IntLike) -> "GaussianInt":
        o = GaussianInt.of(other)
        return GaussianInt(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: IntLike) -> "GaussianInt":
        o = GaussianInt.of(other)
        return GaussianInt(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: IntLike) -> "GaussianInt":
        return GaussianInt.of(other) - self

    def __neg__(self) -> "GaussianInt":
        return GaussianInt(-self.re, -self.im)

    def __mul__(self, other: IntLike) -> "GaussianInt":
        o = GaussianInt.of(other)
        return GaussianInt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "GaussianInt":
        if e < 0:
            raise ValueError("negative powers are not Gaussian integers")
        result, base = ONE, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conj(self) -> "GaussianInt":
        return GaussianInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def __bool__(self) -> bool:
        return bool(self.re or self.im)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def divides(self, other: IntLike) -> bool:
        """True when self | other in Z[i]."""
        o = GaussianInt.of(other)
        if not self:
            return not o
        n = self.norm()
        t = o * self.conj()
        return t.re % n == 0 and t.im % n == 0

    def exact_div(self, other: IntLike) -> "GaussianInt":
        o = GaussianInt.of(other)
        n = o.norm()
        t = self * o.conj()
        if n == 0 or t.re % n or t.im % n:
            raise ArithmeticError(f"{o} does not divide {self}")
        return GaussianInt(t.re // n, t.im // n)

    def associates(self) -> tuple["GaussianInt", ...]:
        return tuple(u * self for u in UNITS)

    def __repr__(self) -> str:
        return f"GaussianInt({self.re}, {self.im})"

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


ONE = GaussianInt(1, 0)
I = GaussianInt(0, 1)
UNITS = (ONE, I, GaussianInt(-1, 0), GaussianInt(0, -1))
TWO_PLUS_TWO_I = GaussianInt(2, 2)


class FourthRoot(Enum):
    """An element of {1, i, -1, -i} or 0; nonzero members are i**value."""

    ONE = 0
    I = 1
    MINUS_ONE = 2
    MINUS_I = 3
    ZERO = -1

    @classmethod
    def from_exponent(cls, e: int) -> "FourthRoot":
        return cls(e % 4)

    @property
    def exponent(self) -> int:
        if self is FourthRoot.ZERO:
            raise ValueError("zero has no exponent")
        return self.value

    def __mul__(self, other: "FourthRoot") -> "FourthRoot":
        if self is FourthRoot.ZERO or other is FourthRoot.ZERO:
            return FourthRoot.ZERO
        return FourthRoot.from_exponent(self.value + other.value)

    def __pow__(self, e: int) -> "FourthRoot":
        if self is FourthRoot.ZERO:
            return FourthRoot.ONE if e == 0 else FourthRoot.ZERO
        return FourthRoot.from_exponent(self.value * e)

    def conj(self) -> "FourthRoot":
        if self is FourthRoot.ZERO:
            return self
        return FourthRoot.from_exponent(-self.value)

    def as_gaussian(self) -> GaussianInt:
        if self is FourthRoot.ZERO:
            return GaussianInt(0, 0)
        return UNITS[self.value]

    def __complex__(self) -> complex:
        return complex(self.as_gaussian())

    def __bool__(self) -> bool:
        return self is not FourthRoot.ZERO


def _unit_root(u: GaussianInt) -> FourthRoot:
    return FourthRoot(UNITS.index(u))


def norm(z: IntLike) -> int:
    return GaussianInt.of(z).norm()


def _round_div(a: int, b: int) -> int:
    # nearest integer to a/b for b > 0, ties upward
    return (2 * a + b) // (2 * b)


def euclid_rem(a: IntLike, b: IntLike) -> GaussianInt:
    """Remainder r = a - q*b with q the componentwise nearest integer to a/b.

    Guarantees ``norm(r) <= norm(b) / 2``.
    """
    a, b = GaussianInt.of(a), GaussianInt.of(b)
    n = b.norm()
    if n == 0:
        raise ZeroDivisionError("Gaussian division by zero")
    t = a * b.conj()
    q = GaussianInt(_round_div(t.re, n), _round_div(t.im, n))
    return a - q * b


def gcd(a: IntLike, b: IntLike) -> GaussianInt:
    a, b = GaussianInt.of(a), GaussianInt.of(b)
    while b:
        a, b = b, euclid_rem(a, b)
    return a


def _pow_mod(base: GaussianInt, e: int, mod: GaussianInt) -> GaussianInt:
    result = euclid_rem(ONE, mod)
    base = euclid_rem(base, mod)
    while e:
        if e & 1:
            result = euclid_rem(result * base, mod)
        base = euclid_rem(base * base, mod)
        e >>= 1
    return result


def is_primary(z: IntLike) -> bool:
    """z = 1 mod (2+2i)."""
    return TWO_PLUS_TWO_I.divides(GaussianInt.of(z) - 1)


def _unit_class_mod(z: GaussianInt, modulus: GaussianInt, reps) -> int | None:
    for idx, r in enumerate(reps):
        if modulus.divides(z - r):
            return idx
    return None


def char_two_plus_two_i(z: IntLike) -> FourthRoot:
    """Quartic character of conductor (2+2i): 1, -1, i, -i map to 1, -1, -i, i."""
    z = GaussianInt.of(z)
    idx = _unit_class_mod(z, TWO_PLUS_TWO_I, UNITS)
    if idx is None:
        return FourthRoot.ZERO
    return (FourthRoot.ONE, FourthRoot.MINUS_I, FourthRoot.MINUS_ONE, FourthRoot.I)[idx]


def char_two(z: IntLike) -> FourthRoot:
    """Quadratic character of conductor (2): +1 on z = 1 mod 2, -1 on z = i mod 2."""
    z = GaussianInt.of(z)
    if z.re % 2 == 1 and z.im % 2 == 0:
        return FourthRoot.ONE
    if z.re % 2 == 0 and z.im % 2 == 1:
        return FourthRoot.MINUS_ONE
    return FourthRoot.ZERO


_THREE_2I = GaussianInt(3, 2)
_CHAR_FOUR_TABLE = (
    (ONE, FourthRoot.ONE),
    (-_THREE_2I, FourthRoot.ONE),
    (GaussianInt(-1), FourthRoot.MINUS_ONE),
    (_THREE_2I, FourthRoot.MINUS_ONE),
    (I, FourthRoot.I),
    (-(I * _THREE_2I), FourthRoot.I),
    (-I, FourthRoot.MINUS_I),
    (I * _THREE_2I, FourthRoot.MINUS_I),
)


def char_four(z: IntLike) -> FourthRoot:
    """Quartic character of conductor (4), by the eight-class table."""
    z = GaussianInt.of(z)
    for rep, value in _CHAR_FOUR_TABLE:
        d = z - rep
        if d.re % 4 == 0 and d.im % 4 == 0:
            return value
    return FourthRoot.ZERO


def primary_generator(z: IntLike) -> GaussianInt:
    z = GaussianInt.of(z)
    if not z or z.norm() % 2 == 0:
        raise ValueError(f"{z} has even norm; no primary associate exists")
    return char_two_plus_two_i(z).as_gaussian() * z


def quartic_symbol_prime(a: IntLike, pi: IntLike) -> FourthRoot:
    """(a/pi)_4 for a Gaussian prime pi of odd norm, from a^((N(pi)-1)/4) mod pi."""
    a, pi = GaussianInt.of(a), GaussianInt.of(pi)
    n = pi.norm()
    if n % 2 == 0:
        raise ValueError(f"modulus {pi} is not coprime to 2")
    if n == 1:
        return FourthRoot.ONE
    if pi.divides(a):
        return FourthRoot.ZERO
    if (n - 1) % 4:
        raise ValueError(f"{pi} is not a Gaussian prime (norm {n})")
    r = _pow_mod(a, (n - 1) // 4, pi)
    idx = _unit_class_mod(r, pi, UNITS)
    if idx is None:
        raise ValueError(f"{pi} is not a Gaussian prime: power residue {r} is not a unit class")
    return FourthRoot(idx)


def factor_int(n: int) -> dict[int, int]:
    """Trial-division factorisation of |n|."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for e in factor_int(n).values())


def sqrt_minus_one_mod(p: int) -> int:
    """x with x^2 = -1 mod p, for a prime p = 1 mod 4 (bases tried 2, 3, 5, ...)."""
    if p % 4 != 1:
        raise ValueError(f"{p} is not 1 mod 4")
    n = 2
    while n < p:
        x = pow(n, (p - 1) // 4, p)
        if x * x % p == p - 1:
            return x
        n += 1
    raise ValueError(f"{p} is not prime")


@lru_cache(maxsize=None)
def split_rational_prime(p: int) -> GaussianInt:
    """A Gaussian prime of norm p for a rational prime p = 1 mod 4 (p = 2 gives 1+i)."""
    if p == 2:
        return GaussianInt(1, 1)
    x = sqrt_minus_one_mod(p)
    g = gcd(GaussianInt(p), GaussianInt(x, 1))
    if g.norm() != p:
        raise ValueError(f"{p} is not prime")
    return g


def gaussian_factor(z: IntLike) -> list[tuple[GaussianInt, int]]:
    """Prime factorisation of z over Z[i], up to a unit, as (prime, exponent) pairs."""
    z = GaussianInt.of(z)
    if not z:
        raise ValueError("cannot factor 0")
    out: list[tuple[GaussianInt, int]] = []
    for p in sorted(factor_int(z.norm())):
        if p % 4 == 3:
            cands = [GaussianInt(p)]
        elif p == 2:
            cands = [GaussianInt(1, 1)]
        else:
            pi = split_rational_prime(p)
            cands = [pi, pi.conj()]
        for pi in cands:
            e = 0
            while pi.divides(z):
                z = z.exact_div(pi)
                e += 1
            if e:
                out.append((pi, e))
    return out


def quartic_symbol_odd(a: IntLike, beta: IntLike) -> FourthRoot:
    """(a/beta)_4 extended multiplicatively over the prime factorisation of beta.

    ``beta`` may be a rational odd integer (sign irrelevant, only the ideal
    matters) or any Gaussian integer of odd norm.
    """
    beta = GaussianInt.of(beta)
    if beta.norm() % 2 == 0:
        raise ValueError(f"{beta} is not coprime to 2")
    if beta.im == 0:
        return _rational_symbol(GaussianInt.of(a), abs(beta.re))
    result = FourthRoot.ONE
    for pi, e in gaussian_factor(beta):
        result = result * quartic_symbol_prime(a, pi) ** e
    return result


def _rational_symbol(a: GaussianInt, m: int) -> FourthRoot:
    result = FourthRoot.ONE
    for p, e in factor_int(m).items() if m > 1 else ():
        if p % 4 == 3:
            s = quartic_symbol_prime(a, GaussianInt(p))
        else:
            pi = split_rational_prime(p)
            s = quartic_symbol_prime(a, pi) * quartic_symbol_prime(a, pi.conj())
        result = result * s**e
    return result


def residues(modulus: IntLike) -> Iterator[GaussianInt]:
    """A complete residue system for Z[i]/(modulus) via the Hermite form of the ideal lattice."""
    m = GaussianInt.of(modulus)
    n = m.norm()
    if n == 0:
        raise ValueError("zero modulus")
    from math import gcd as igcd

    g = igcd(m.re, m.im)
    e = n // g
    for v in range(g):
        for u in range(e):
            yield GaussianInt(u, v)
