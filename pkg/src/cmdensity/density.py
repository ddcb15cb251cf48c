"""One-level density of the families {xi_{d,k} : k = alpha mod 8} via the explicit formula.

Test functions are specified on the Fourier side (compactly supported fhat).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy import integrate, special

from .constants import DEFAULT_CUTOFF, MAX_J, big_C_m
from .hecke import conductor, split_generator_angle, split_prime_record, validate_d
from .primes import PrimeTable, load_or_sieve

__all__ = [
    "TestFunction",
    "Fejer",
    "PolyBump",
    "parse_family",
    "AngleTable",
    "angle_table_for",
    "DensityReport",
    "log_kM",
    "u_gamma",
    "u_gamma_tau",
    "u_ram",
    "u_inert",
    "u_split",
    "one_level",
    "dirichlet_kernel_8",
    "dirichlet_direct",
    "averaged_density",
    "prediction",
    "katz_sarnak_density",
    "katz_sarnak_density_x",
    "nonvanishing_lower_bound",
]


# --- test functions ----------------------------------------------------------------

@dataclass(frozen=True)
class TestFunction:
    """Even test function given by its Fourier transform fhat, supported in [-nu, nu]."""

    nu: float
    scale: float = field(default=1.0, kw_only=True)

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if not 0 < self.nu < 1:
            raise ValueError(f"support radius nu={self.nu} must lie in (0, 1)")

    # subclasses provide _shape(u) for u = t/nu in [0, 1]
    def fhat(self, t):
        t = np.abs(np.asarray(t, dtype=float))
        out = np.zeros_like(t)
        inside = t < self.nu
        out[inside] = self.scale * self._shape(t[inside] / self.nu)
        return out if out.ndim else float(out)

    def fhat_deriv0(self, j: int) -> float:
        raise NotImplementedError

    def fhat_derivs(self, J: int) -> list[float]:
        return [self.fhat_deriv0(j) for j in range(J + 1)]

    def integral(self) -> float:
        """Integral of fhat over R, which equals phi(0)."""
        raise NotImplementedError

    def phi(self, x):
        raise NotImplementedError

    def phi_quad(self, x: float) -> float:
        """phi(x) = 2 int_0^nu fhat(t) cos(2 pi x t) dt by adaptive quadrature."""
        val, _ = integrate.quad(lambda t: float(self.fhat(t)) * math.cos(2 * math.pi * x * t),
                                0.0, self.nu, limit=200, epsabs=1e-14, epsrel=1e-12)
        return 2.0 * val

    def scaled(self, c: float) -> "TestFunction":
        kw = {k: v for k, v in asdict(self).items() if k != "scale"}
        return type(self)(scale=self.scale * c, **kw)

    @property
    def label(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Fejer(TestFunction):
    """phi(x) = (sin(pi nu x)/(pi nu x))^2, fhat(t) = (nu - |t|)/nu^2."""

    def _shape(self, u):
        return (1.0 - u) / self.nu

    def fhat_deriv0(self, j: int) -> float:
        if j == 0:
            return self.scale / self.nu
        if j % 2:
            return 0.0
        raise ValueError("the Fejer transform has a corner at 0; even derivatives of order >= 2 do not exist")

    def integral(self) -> float:
        return self.scale

    def phi(self, x):
        return self.scale * np.sinc(self.nu * np.asarray(x, dtype=float)) ** 2

    @property
    def label(self) -> str:
        return f"fejer(nu={self.nu})"


@dataclass(frozen=True)
class PolyBump(TestFunction):
    """fhat(t) = (1 - (t/nu)^2)^m on |t| < nu."""

    m: int = 4

    def __post_init__(self):
        super().__post_init__()
        if self.m < 1:
            raise ValueError("PolyBump needs m >= 1")

    def _shape(self, u):
        return (1.0 - u * u) ** self.m

    def fhat_deriv0(self, j: int) -> float:
        if j % 2:
            return 0.0
        h = j // 2
        if h > self.m:
            return 0.0
        return self.scale * (-1) ** h * math.factorial(j) * math.comb(self.m, h) * self.nu ** (-j)

    def integral(self) -> float:
        m = self.m
        return self.scale * self.nu * 2 ** (2 * m + 1) * math.factorial(m) ** 2 / math.factorial(2 * m + 1)

    def phi(self, x):
        """Closed form nu * m! 2^(m+1) j_m(a)/a^m with a = 2 pi nu x (spherical Bessel j_m)."""
        x = np.abs(np.asarray(x, dtype=float))
        a = 2 * math.pi * self.nu * x
        m = self.m
        out = np.empty_like(a)
        small = a < 1.0
        # series of j_m(a)/a^m near 0
        if np.any(small):
            s = a[small]
            acc = np.zeros_like(s)
            term = np.full_like(s, 1.0 / _double_factorial(2 * m + 1))
            for kk in range(12):
                acc += term
                term = term * (-(s * s) / 2) / ((kk + 1) * (2 * m + 2 * kk + 3))
            out[small] = acc
        big = ~small
        if np.any(big):
            out[big] = special.spherical_jn(m, a[big]) / a[big] ** m
        res = self.scale * self.nu * math.factorial(m) * 2 ** (m + 1) * out
        return res if res.ndim else float(res)

    @property
    def label(self) -> str:
        return f"polybump(nu={self.nu}, m={self.m})"


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2))


def parse_family(text: str, nu: float) -> TestFunction:
    """'fejer' or 'polybump:m'."""
    name, _, arg = text.partition(":")
    name = name.strip().lower()
    if name == "fejer":
        return Fejer(nu)
    if name == "polybump":
        return PolyBump(nu, m=int(arg) if arg else 4)
    raise ValueError(f"unknown test family {text!r}")


# --- normalisation -----------------------------------------------------------------

def log_kM(d: int, k: int) -> float:
    """log(k M_{d,k}) with M the square root of the conductor norm."""
    _, n = conductor(d, k)
    return math.log(k) + 0.5 * math.log(n)


# --- Gamma factor ----------------------------------------------------------------

def u_gamma(d: int, k: int, f: TestFunction) -> float:
    """Archimedean term, evaluated on the Fourier side.

    With a = (k+1)/2 and L = log(k^2 N):
    L * U = (log N - 2 log pi) fhat(0) + 2 [fhat(0) psi(a) + int_0^inf e^{-as}(fhat(0) - fhat(s/L))/(1 - e^{-s}) ds].
    """
    _, N = conductor(d, k)
    L = math.log(k * k * N)
    a = (k + 1) / 2
    f0 = float(f.fhat(0.0))

    def integrand(s):
        if s == 0.0:
            return 0.0
        return math.exp(-a * s) * (f0 - float(f.fhat(s / L))) / -math.expm1(-s)

    edge = f.nu * L
    inner, _ = integrate.quad(integrand, 0.0, edge, limit=400, epsabs=1e-15, epsrel=1e-13)
    # beyond the support fhat(s/L) = 0
    outer, _ = integrate.quad(lambda s: math.exp(-a * s) / -math.expm1(-s), edge, math.inf,
                              epsabs=1e-16, epsrel=1e-13)
    total = (math.log(N) - 2 * math.log(math.pi)) * f0 + 2 * (f0 * float(special.digamma(a)) + inner + f0 * outer)
    return total / L


def u_gamma_tau(d: int, k: int, f: TestFunction, tau_max: float = 400.0) -> float:
    """Same term by direct quadrature in tau against phi(tau) (slow reference path)."""
    _, N = conductor(d, k)
    L = math.log(k * k * N)
    a = (k + 1) / 2
    w = 2 * math.pi / L

    def integrand(tau):
        psi = special.digamma(complex(a, w * tau))
        return (math.log(N) - 2 * math.log(math.pi) + 2 * psi.real) * float(f.phi(tau))

    val, _ = integrate.quad(integrand, 0.0, tau_max, limit=4000, epsabs=1e-13, epsrel=1e-12)
    return 2 * val / L


# --- finite primes -----------------------------------------------------------------

def u_ram(d: int, k: int, f: TestFunction) -> float:
    if k % 4:
        return 0.0
    lk = log_kM(d, k)
    sign = -1.0 if (k // 4) % 2 else 1.0
    terms = []
    n = 1
    while n * math.log(2) / (2 * lk) < f.nu:
        terms.append(sign**n * math.log(2) / 2 ** (n / 2) * float(f.fhat(n * math.log(2) / (2 * lk))))
        n += 1
    return -math.fsum(terms) / lk


_INERT_CACHE: dict = {}


def _inert_prime_powers(limit: float, table: PrimeTable) -> np.ndarray:
    """Rows (p, n, log p, p^-n) for p = 3 mod 4 and p^n <= limit."""
    key = (limit, id(table))
    if key in _INERT_CACHE:
        return _INERT_CACHE[key]
    rows = []
    for p in table.primes_3mod4[table.primes_3mod4 <= limit]:
        p = int(p)
        pw, n = p, 1
        while pw <= limit:
            rows.append((p, n, math.log(p), 1.0 / pw))
            pw *= p
            n += 1
    out = np.array(rows, dtype=float).reshape(-1, 4)
    if len(_INERT_CACHE) > 256:
        _INERT_CACHE.clear()
    _INERT_CACHE[key] = out
    return out


def u_inert(d: int, k: int, f: TestFunction, table: PrimeTable | None = None) -> float:
    d = validate_d(d)
    lk = log_kM(d, k)
    reach = math.exp(f.nu * lk)
    table = table or load_or_sieve(max(int(reach) + 1, 10))
    table.require(reach)
    rows = _inert_prime_powers(reach, table)
    if len(rows) == 0:
        return 0.0
    p, n, logp, inv = rows.T
    keep = n * logp / lk < f.nu
    if k % 4:
        # primes dividing the conductor carry no local factor
        keep &= (abs(d) % p.astype(np.int64)) != 0
    sign = np.where((k * n.astype(np.int64)) % 2 == 1, -1.0, 1.0)
    terms = 2 * sign * logp * inv * f.fhat(n * logp / lk)
    return -math.fsum(terms[keep]) / lk


@dataclass(frozen=True)
class AngleTable:
    """theta_{d,p} for all p = 1 mod 4 up to limit; primes dividing d use a generator angle."""

    d: int
    limit: int
    primes: np.ndarray
    theta: np.ndarray
    divides_d: np.ndarray

    def require(self, x: float) -> None:
        if x > self.limit:
            raise OverflowError(f"angle table up to {self.limit} does not cover {x:.6g}")

    def restrict(self, primes) -> "AngleTable":
        sel = np.isin(self.primes, np.asarray(primes))
        return AngleTable(self.d, self.limit, self.primes[sel], self.theta[sel], self.divides_d[sel])


@lru_cache(maxsize=32)
def angle_table_for(d: int, limit: int) -> AngleTable:
    d = validate_d(d)
    table = load_or_sieve(max(limit, 10))
    ps = table.primes_1mod4[table.primes_1mod4 <= limit]
    theta = np.empty(len(ps))
    div = np.zeros(len(ps), dtype=bool)
    for i, p in enumerate(ps):
        p = int(p)
        if d % p == 0:
            div[i] = True
            theta[i] = split_generator_angle(p)
        else:
            theta[i] = split_prime_record(d, p).theta
    for arr in (ps, theta, div):
        arr.setflags(write=False)
    return AngleTable(d, limit, ps, theta, div)


def _split_rows(angles: AngleTable, reach: float):
    """Arrays over prime powers p^n <= reach: n, log p, p^(-n/2), n*theta, p | d."""
    ns, logs, w, nth, div = [], [], [], [], []
    for p, th, dv in zip(angles.primes, angles.theta, angles.divides_d):
        p = int(p)
        if p > reach:
            break
        pw, n = p, 1
        while pw <= reach:
            ns.append(n)
            logs.append(math.log(p))
            w.append(pw ** -0.5)
            nth.append(n * th)
            div.append(dv)
            pw *= p
            n += 1
    return (np.array(ns, dtype=float), np.array(logs), np.array(w),
            np.array(nth), np.array(div, dtype=bool))


def u_split(d: int, k: int, f: TestFunction, angles: AngleTable | None = None) -> float:
    d = validate_d(d)
    lk = log_kM(d, k)
    reach = math.exp(2 * f.nu * lk)
    angles = angles or angle_table_for(d, int(reach) + 1)
    if angles.d != d:
        raise ValueError("angle table belongs to another d")
    angles.require(reach)
    n, logp, w, nth, div = _split_rows(angles, reach)
    if len(n) == 0:
        return 0.0
    arg = n * logp / (2 * lk)
    keep = arg < f.nu
    if k % 4:
        keep &= ~div
    terms = 2 * np.cos(k * nth) * logp * w * f.fhat(arg)
    return -math.fsum(terms[keep]) / lk


def one_level(d: int, k: int, f: TestFunction, table: PrimeTable | None = None,
              angles: AngleTable | None = None) -> dict:
    """The four explicit-formula pieces of D(phi, xi_{d,k}) and their sum."""
    parts = {
        "gamma": u_gamma(d, k, f),
        "ram": u_ram(d, k, f),
        "inert": u_inert(d, k, f, table),
        "split": u_split(d, k, f, angles),
    }
    parts["total"] = math.fsum(parts.values())
    return parts


# --- k-averaging -------------------------------------------------------------------

def _class_rep(alpha: int) -> int:
    return alpha % 8 or 8


def dirichlet_direct(K: int, alpha: int, x):
    """sum of 2 cos(k x) over 1 <= k <= K, k = alpha mod 8."""
    a = _class_rep(alpha)
    ks = np.arange(a, K + 1, 8, dtype=float)
    x = np.asarray(x, dtype=float)
    return 2.0 * np.cos(np.multiply.outer(x, ks)).sum(axis=-1)


def dirichlet_kernel_8(K, alpha: int, x, guard: float = 1e-6):
    """Closed form (sin((8 floor((K - a)/8) + a + 4) x) - sin((a - 4) x)) / sin(4x).

    Falls back to the direct cosine sum where |sin 4x| < guard. ``K`` may be an array.
    """
    a = _class_rep(alpha)
    K = np.asarray(K)
    x = np.asarray(x, dtype=float)
    top = 8 * np.floor_divide(K - a, 8) + a + 4
    s4 = np.sin(4 * x)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (np.sin(top * x) - np.sin((a - 4) * x)) / s4
    bad = np.abs(s4) < guard
    if np.any(bad):
        Kb, xb = np.broadcast_arrays(K, x)
        val = np.array(np.atleast_1d(val), dtype=float)
        flat_K, flat_x, flat_bad = Kb.reshape(-1), xb.reshape(-1), np.broadcast_to(bad, Kb.shape).reshape(-1)
        flat = val.reshape(-1)
        for i in np.flatnonzero(flat_bad):
            flat[i] = float(dirichlet_direct(int(flat_K[i]), a, flat_x[i]))
        val = flat.reshape(Kb.shape)
    return val if np.ndim(val) else float(val)


def _ks(alpha: int, K: int) -> np.ndarray:
    return np.arange(_class_rep(alpha), K + 1, 8)


def _split_average_kernel(d: int, alpha: int, K: int, f: TestFunction, angles: AngleTable) -> float:
    """(8/K) sum_k u_split(k) by Abel summation against the closed-form kernel.

    For each prime power the k-dependent weight g(k) = fhat(n log p / (2 log kM)) / log kM
    is summed against 2 cos(k n theta) through the partial sums D_{k,alpha}(n theta).
    """
    ks = _ks(alpha, K)
    lks = np.array([log_kM(d, int(k)) for k in ks])
    reach = math.exp(2 * f.nu * lks[-1])
    angles.require(reach)
    n, logp, w, nth, div = _split_rows(angles, reach)
    if alpha % 4:
        sel = ~div
        n, logp, w, nth = n[sel], logp[sel], w[sel], nth[sel]
    total = []
    for ni, lp, wi, x in zip(n, logp, w, nth):
        g = f.fhat(ni * lp / (2 * lks)) / lks
        nz = np.flatnonzero(g)
        if len(nz) == 0:
            continue
        i0 = nz[0]
        # g vanishes for k below the support threshold, so start at i0
        D = dirichlet_kernel_8(ks[i0:], alpha, x) - dirichlet_kernel_8(ks[i0] - 1, alpha, x)
        gg = g[i0:]
        s = D[-1] * gg[-1] - np.sum(D[:-1] * np.diff(gg))
        total.append(lp * wi * s)
    return -8.0 / K * math.fsum(total)


@dataclass
class DensityReport:
    d: int
    alpha: int
    K: int
    mode: str
    test_function: str
    measured: float
    gamma_term: float
    ram_term: float
    inert_term: float
    split_term: float
    main_term: float
    lower_order: list[float] = field(default_factory=list)
    prediction: float | None = None
    residual: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def averaged_density(d: int, alpha: int, K: int, f: TestFunction,
                     mode: Literal["exact", "kernel"] = "exact", J: int | None = None,
                     x: float = DEFAULT_CUTOFF) -> DensityReport:
    """(8/K) sum over k <= K, k = alpha mod 8, of D(phi, xi_{d,k}).

    ``exact`` sums every term per k; ``kernel`` replaces the split-prime average by
    Abel summation against the mod-8 Dirichlet kernel. With ``J`` set, the
    prediction through order J and the residual are attached.
    """
    d = validate_d(d)
    if mode not in ("exact", "kernel"):
        raise ValueError(f"unknown mode {mode!r}")
    ks = _ks(alpha, K)
    if len(ks) == 0:
        raise ValueError(f"no k <= {K} with k = {alpha} mod 8")
    lk_max = log_kM(d, int(ks[-1]))
    table = load_or_sieve(max(int(math.exp(f.nu * lk_max)) + 1, 10))
    angles = angle_table_for(d, int(math.exp(2 * f.nu * lk_max)) + 1)
    gs, rs, is_, ss = [], [], [], []
    for k in ks:
        k = int(k)
        gs.append(u_gamma(d, k, f))
        rs.append(u_ram(d, k, f))
        is_.append(u_inert(d, k, f, table))
        if mode == "exact":
            ss.append(u_split(d, k, f, angles))
    scale = 8.0 / K
    g, r, i = scale * math.fsum(gs), scale * math.fsum(rs), scale * math.fsum(is_)
    s = scale * math.fsum(ss) if mode == "exact" else _split_average_kernel(d, alpha, K, f, angles)
    sign = -1.0 if alpha % 2 == 0 else 1.0
    main = float(f.fhat(0.0)) + sign * 0.5 * f.integral()
    rep = DensityReport(d=d, alpha=_class_rep(alpha), K=K, mode=mode, test_function=f.label,
                        measured=math.fsum([g, r, i, s]), gamma_term=g, ram_term=r,
                        inert_term=i, split_term=s, main_term=main)
    if J is not None:
        rep.lower_order = _lower_order_terms(d, alpha, K, f, J, x)
        rep.prediction = main + math.fsum(rep.lower_order)
        rep.residual = rep.measured - rep.prediction
    return rep


def _lower_order_terms(d: int, alpha: int, K: int, f: TestFunction, J: int, x: float) -> list[float]:
    if not 0 <= J <= MAX_J:
        raise ValueError(f"J={J} outside [0, {MAX_J}]")
    _, n = conductor(d, _class_rep(alpha))
    big_l = math.log(K) + 0.5 * math.log(n)
    derivs = {j: f.fhat_deriv0(j) for j in range(0, J, 2)}
    return [big_C_m(m, d, alpha, derivs, x).value / big_l**m for m in range(1, J + 1)]


def prediction(d: int, alpha: int, K: int, f: TestFunction, J: int, x: float = DEFAULT_CUTOFF) -> float:
    """fhat(0) -/+ (1/2) int fhat + sum_{m <= J} C_m / log(K M_{d,alpha})^m (minus for even alpha)."""
    d = validate_d(d)
    sign = -1.0 if alpha % 2 == 0 else 1.0
    main = float(f.fhat(0.0)) + sign * 0.5 * f.integral()
    return main + math.fsum(_lower_order_terms(d, alpha, K, f, J, x))


# --- random-matrix predictions -----------------------------------------------------

_GROUPS = ("U", "Sp", "SOeven", "SOodd")


def _eta_integral(f: TestFunction) -> float:
    # eta = 1 on (-1, 1) and fhat vanishes outside (-nu, nu) with nu < 1
    return f.integral()


def katz_sarnak_density(G: str, f: TestFunction) -> float:
    """int W_G(x) phi(x) dx computed on the Fourier side."""
    f0 = float(f.fhat(0.0))
    if G == "U":
        return f0
    if G == "Sp":
        return f0 - 0.5 * _eta_integral(f)
    if G == "SOeven":
        return f0 + 0.5 * _eta_integral(f)
    if G == "SOodd":
        return f0 + f.integral() - 0.5 * _eta_integral(f)
    raise ValueError(f"unknown group {G!r}; expected one of {_GROUPS}")


def katz_sarnak_density_x(G: str, f: TestFunction, x_max: float = 2000.0) -> float:
    """Same quantity by quadrature of W_G(x) phi(x) in position space (reference path)."""
    def sinc_part(x):
        return float(np.sinc(2 * x))

    sgn = {"U": 0.0, "Sp": -1.0, "SOeven": 1.0, "SOodd": -1.0}[G]
    pts = np.arange(0.0, x_max + 1e-9, 1.0)
    total = []
    for lo, hi in zip(pts[:-1], pts[1:]):
        v, _ = integrate.quad(lambda x: (1.0 + sgn * sinc_part(x)) * float(f.phi(x)), lo, hi,
                              epsabs=1e-15, epsrel=1e-12)
        total.append(v)
    val = 2 * math.fsum(total)
    if G == "SOodd":
        val += float(f.phi(0.0))
    return val


def nonvanishing_lower_bound(case: Literal["even", "odd_plus", "odd_minus"], nu):
    """Proportion bounds obtained from the Fejer kernel with support nu.

    A ``Fraction`` nu gives an exact rational result.
    """
    if not 0 < nu < 1:
        raise ValueError(f"nu={nu} must lie in (0, 1)")
    half, quarter = Fraction(1, 2), Fraction(1, 4)
    if case == "even":
        out = 1 - half * (1 / nu - half)
    elif case == "odd_plus":
        out = 1 - half * (1 / nu + half)
    elif case == "odd_minus":
        out = 1 - (half / nu - quarter)
    else:
        raise ValueError(f"unknown case {case!r}")
    return out if isinstance(nu, Fraction) else float(out)
