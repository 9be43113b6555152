"""Level-1 Hecke eigenforms in the one-dimensional cusp-form spaces.

S_k(SL_2(Z)) is spanned by a single normalised eigenform for
k in {12, 16, 18, 20, 22, 26}; it is Delta times a monomial in E_4, E_6.
All q-expansions are exact Python integers.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chebyshev import MeasureSpec, cheb_eval, cheb_values, zm_power_integral
from .curves import primes_up_to
from .kernels import PeriodicWeight, periodic_weight_eval

# weight -> (power of E_4, power of E_6) multiplying Delta
SUPPORTED_WEIGHTS = {12: (0, 0), 16: (1, 0), 18: (0, 1), 20: (2, 0), 22: (1, 1), 26: (2, 1)}
MAX_NMAX = 10**5
CLAMP_TOLERANCE = 1e-12


class UnsupportedWeightError(ValueError):
    pass


def divisor_power_sums(n_max: int, power: int) -> list[int]:
    """sigma_power(n) for 0 <= n <= n_max by a divisor sieve (index 0 unused)."""
    sig = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        dp = d**power
        for m in range(d, n_max + 1, d):
            sig[m] += dp
    return sig


def series_mul(f: Sequence[int], g: Sequence[int], n_terms: int) -> list[int]:
    """First ``n_terms`` coefficients of f * g, by Kronecker substitution.

    Both series are packed into one big integer at a bit stride wide enough
    for any signed coefficient of the product, multiplied with CPython's
    subquadratic big-int product, and unpacked.
    """
    f = list(f[:n_terms])
    g = list(g[:n_terms])
    if not f or not g:
        return [0] * n_terms
    bound = max(map(abs, f)).bit_length() + max(map(abs, g)).bit_length()
    bound += min(len(f), len(g)).bit_length() + 2
    stride = -(-bound // 8) * 8
    prod = _pack(f, stride) * _pack(g, stride)
    return _unpack(prod, stride, len(f) + len(g) - 1)[:n_terms] + [0] * max(
        0, n_terms - (len(f) + len(g) - 1)
    )


def _pack(coeffs: list[int], stride: int) -> int:
    """sum_i coeffs[i] 2^(stride i), assembled from byte strings in linear time."""
    nbytes = stride // 8
    pos = b"".join(max(c, 0).to_bytes(nbytes, "little") for c in coeffs)
    neg = b"".join(max(-c, 0).to_bytes(nbytes, "little") for c in coeffs)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _unpack(value: int, stride: int, count: int) -> list[int]:
    # offset every digit by 2^(stride-1) so all digits are nonnegative
    half = 1 << (stride - 1)
    offset = _pack([half] * count, stride)
    nbytes = stride // 8
    raw = (value + offset).to_bytes(nbytes * count + 1, "little")
    return [
        int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") - half for i in range(count)
    ]


def series_mul_schoolbook(f: Sequence[int], g: Sequence[int], n_terms: int) -> list[int]:
    out = [0] * n_terms
    for i, a in enumerate(f[:n_terms]):
        if a:
            for j in range(min(len(g), n_terms - i)):
                out[i + j] += a * g[j]
    return out


def eisenstein_e4(n_terms: int) -> list[int]:
    sig = divisor_power_sums(n_terms - 1, 3)
    return [1] + [240 * s for s in sig[1:]]


def eisenstein_e6(n_terms: int) -> list[int]:
    sig = divisor_power_sums(n_terms - 1, 5)
    return [1] + [-504 * s for s in sig[1:]]


@functools.lru_cache(maxsize=8)
def _eisenstein_pair(n_terms: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return tuple(eisenstein_e4(n_terms)), tuple(eisenstein_e6(n_terms))


def discriminant_series(n_terms: int) -> list[int]:
    """Delta = (E_4^3 - E_6^2) / 1728, index = power of q."""
    e4, e6 = _eisenstein_pair(n_terms)
    e4_cubed = series_mul(series_mul(e4, e4, n_terms), e4, n_terms)
    e6_sq = series_mul(e6, e6, n_terms)
    out = []
    for n, (u, v) in enumerate(zip(e4_cubed, e6_sq)):
        q, rem = divmod(u - v, 1728)
        if rem:
            raise ArithmeticError(f"E4^3 - E6^2 not divisible by 1728 at q^{n}")
        out.append(q)
    return out


@dataclass(frozen=True)
class EigenformQExpansion:
    """Normalised eigenform f = sum c(n) q^n; ``coeffs[n]`` is c(n), coeffs[0] = 0."""

    weight: int
    coeffs: tuple[int, ...]
    level: int = 1

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1

    def c(self, n: int) -> int:
        if not 1 <= n <= self.n_max:
            raise IndexError(f"coefficient c({n}) outside 1..{self.n_max}")
        return self.coeffs[n]

    def normalized(self, n: int) -> float:
        """a_f(n) = c(n) / n^((k-1)/2)."""
        return self.c(n) / n ** ((self.weight - 1) / 2)

    def deligne_ok(self) -> bool:
        """c(p)^2 <= 4 p^(k-1) for every prime p <= n_max, in exact integers."""
        k = self.weight
        return all(self.coeffs[p] ** 2 <= 4 * p ** (k - 1) for p in map(int, primes_up_to(self.n_max)))

    def to_csv(self) -> str:
        lines = ["n,c_n"] + [f"{n},{c}" for n, c in enumerate(self.coeffs) if n >= 1]
        return "\n".join(lines) + "\n"


@functools.lru_cache(maxsize=16)
def eigenform(k: int, n_max: int) -> EigenformQExpansion:
    if k not in SUPPORTED_WEIGHTS:
        raise UnsupportedWeightError(
            f"weight {k} unsupported: S_k(SL2(Z)) must be one-dimensional, k in {sorted(SUPPORTED_WEIGHTS)}"
        )
    if not 1 <= n_max <= MAX_NMAX:
        raise ValueError(f"n_max must lie in [1, {MAX_NMAX}]")
    n_terms = n_max + 1
    series = discriminant_series(n_terms)
    e4, e6 = _eisenstein_pair(n_terms)
    i, j = SUPPORTED_WEIGHTS[k]
    for _ in range(i):
        series = series_mul(series, e4, n_terms)
    for _ in range(j):
        series = series_mul(series, e6, n_terms)
    if series[1] != 1:
        raise ArithmeticError("eigenform is not normalised")
    return EigenformQExpansion(k, tuple(series))


def theta_f(form: EigenformQExpansion, p: int) -> float:
    ratio = form.c(p) / (2.0 * p ** ((form.weight - 1) / 2))
    if abs(ratio) > 1.0 + CLAMP_TOLERANCE:
        raise ArithmeticError(f"Deligne bound violated at p = {p}")
    return math.acos(min(1.0, max(-1.0, ratio))) / math.pi


def af_prime_power(form: EigenformQExpansion, p: int, m: int) -> float:
    """a_f(p^m) via X_m(2 cos(pi theta_f(p)))."""
    return cheb_eval(m, theta_f(form, p))


def hecke_prime_power(form: EigenformQExpansion, p: int, m: int) -> int:
    """c(p^m) by c(p^{j+1}) = c(p) c(p^j) - p^(k-1) c(p^{j-1})."""
    prev, cur = 1, form.c(p)
    if m == 0:
        return 1
    for _ in range(m - 1):
        prev, cur = cur, form.c(p) * cur - p ** (form.weight - 1) * prev
    return cur


def n_phi_f_identity_check(form: EigenformQExpansion, x: float, weight: PeriodicWeight) -> float:
    """|N_f(x) - pi(x) mean - sum_m U(m) sum_{p <= x} a_f(p^{2m})|."""
    if not 6 < x <= form.n_max:
        raise ValueError(f"need 6 < x <= n_max = {form.n_max}")
    ps = [int(p) for p in primes_up_to(math.floor(x))]
    thetas = np.array([theta_f(form, p) for p in ps])
    lhs = math.fsum(periodic_weight_eval(weight.kernel, weight.L, thetas)) - len(ps) * weight.mean
    rows = cheb_values(2 * weight.M, 2.0 * np.cos(math.pi * thetas))
    rhs = math.fsum(u * math.fsum(rows[2 * m]) for m, u in enumerate(weight.u_coeffs, start=1))
    return abs(lhs - rhs)


@dataclass(frozen=True)
class TraceResidual:
    n: int
    lhs: float
    main_term: float
    residual: float
    divisor_bound_ok: bool


def _sigma0(n: int) -> int:
    return sum(2 if d * d != n else 1 for d in range(1, math.isqrt(n) + 1) if n % d == 0)


def trace_residual(k: int, n: int, n_max: int | None = None) -> TraceResidual:
    """Singleton-family trace average a_f(n) against its square-indicator main term."""
    form = eigenform(k, max(n, n_max or n))
    lhs = form.normalized(n)
    r = math.isqrt(n)
    main = 1.0 / r if r * r == n else 0.0
    return TraceResidual(n, lhs, main, lhs - main, abs(lhs) <= _sigma0(n) + 1e-12)


def zm_main_term(weight: PeriodicWeight, partition: Sequence[int], primes: Sequence[int]) -> float:
    """prod_i int Z_M^{r_i} d mu_{p_i}."""
    if len(partition) != len(primes):
        raise ValueError("partition and primes must have equal length")
    out = 1.0
    for r, p in zip(partition, primes):
        out *= zm_power_integral(weight, r, MeasureSpec.mu_p(p))
    return out
