"""Root numbers of xi_{d,k}: closed-form table and a Gauss-sum oracle."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .hecke import conductor, eta_modulus, validate_d, xi_fin_k
from .zi_core import GaussianInt, residues

__all__ = [
    "Method",
    "RootNumberResult",
    "root_number_closed",
    "root_number_gauss",
    "s_minus",
    "s_plus",
    "negative_fraction",
    "GAUSS_D_CUTOFF",
    "GAUSS_K_CUTOFF",
]

GAUSS_D_CUTOFF = 99
GAUSS_K_CUTOFF = 64
UNIT_CLASSES = frozenset({1, 3, 5, 7})


class Method(Enum):
    CLOSED_FORM = "closed_form"
    GAUSS_SUM = "gauss_sum"


@dataclass(frozen=True)
class RootNumberResult:
    w: int
    method: Method
    residual: float = 0.0
    raw: complex | None = None


def _sgn(d: int) -> int:
    return 1 if d > 0 else -1


def root_number_closed(d: int, k: int) -> int:
    d = validate_d(d)
    if k < 1:
        raise ValueError("k must be positive")
    if k % 2 == 0:
        return 1
    s = _sgn(d)
    if d % 4 == 1:
        low = k % 8 in (1, 3)
        if d % 16 in (5, 9):
            return -s if low else s
        return s if low else -s
    if d % 8 == 3:
        return s if k % 4 == 1 else -s
    return -s if k % 4 == 1 else s


def s_minus(d: int) -> frozenset[int]:
    """Classes alpha in (Z/8)^x with W(xi_{d,k}) = -1 for k = alpha mod 8."""
    d = validate_d(d)
    pos = d > 0
    if d % 16 in (1, 13):
        return frozenset({5, 7} if pos else {1, 3})
    if d % 16 in (5, 9):
        return frozenset({1, 3} if pos else {5, 7})
    if d % 8 == 3:
        return frozenset({3, 7} if pos else {1, 5})
    return frozenset({1, 5} if pos else {3, 7})


def s_plus(d: int) -> frozenset[int]:
    return UNIT_CLASSES - s_minus(d)


def negative_fraction(d: int, K: int) -> Fraction:
    """Exact share of k in [1, K] whose root number is -1."""
    d = validate_d(d)
    if K < 1:
        raise ValueError("K must be positive")
    # the sign depends on k mod 8 only
    per_class = [root_number_closed(d, a if a else 8) == -1 for a in range(8)]
    full, rem = divmod(K, 8)
    count = full * sum(per_class) + sum(per_class[a] for a in range(1, rem + 1))
    return Fraction(count, K)


def root_number_gauss(d: int, k: int, *, d_cutoff: int = GAUSS_D_CUTOFF,
                      k_cutoff: int = GAUSS_K_CUTOFF) -> RootNumberResult:
    """Root number from the Gauss sum over Z[i] modulo the conductor.

    W = i^-k N(f)^-1/2 (gamma/|gamma|)^k sum_x xi_fin(x) e(tr(x/gamma)),
    with gamma = 2 g |d| a generator of (2) f and tr(z) = 2 Re z.
    """
    d = validate_d(d)
    if abs(d) > d_cutoff or not 1 <= k <= k_cutoff:
        raise OverflowError(f"(d={d}, k={k}) is beyond the Gauss-sum oracle range")
    if k % 4 == 0:
        return RootNumberResult(1, Method.GAUSS_SUM, 0.0, 1 + 0j)

    f, n_f = conductor(d, k)
    gamma = eta_modulus(d, k) * (2 * abs(d))
    n_gamma = gamma.norm()
    gc = gamma.conj()
    re_parts: list[float] = []
    im_parts: list[float] = []
    for x in residues(f):
        v = xi_fin_k(d, k, x)
        if not v:
            continue
        t = x * gc
        # tr(x/gamma) = 2 Re(x conj(gamma)) / N(gamma); reduce the numerator exactly
        phase = 2 * math.pi * ((2 * t.re) % n_gamma) / n_gamma
        e = complex(math.cos(phase), math.sin(phase)) * complex(v)
        re_parts.append(e.real)
        im_parts.append(e.imag)
    s = complex(math.fsum(re_parts), math.fsum(im_parts))
    unit = complex(gamma) / abs(complex(gamma))
    raw = (1j) ** (-k) * unit**k * s / math.sqrt(n_f)
    w = 1 if raw.real >= 0 else -1
    residual = abs(raw - w)
    if residual > 1e-6:
        raise ArithmeticError(f"Gauss sum for (d={d}, k={k}) is {raw}, not a sign")
    return RootNumberResult(w, Method.GAUSS_SUM, residual, raw)
