"""Chebyshev polynomials of the second kind and the Sato-Tate measures.

X_n is normalised so that X_n(2 cos(pi t)) = sin((n+1) pi t) / sin(pi t),
i.e. X_0 = 1, X_1 = x, X_{n+1} = x X_n - X_{n-1}.  These are the characters
of Sym^n SU(2), so for a Hecke eigenvalue a(p) = 2 cos(pi theta) one has
a(p^n) = X_n(a(p)).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from ._quadrature import trapezoid_unit

MAX_POLY_DEGREE = 10_000
MAX_D_ARGS = 8
MAX_D_TOTAL = 64
MAX_MOMENT_INDEX = 200
MAX_POWER = 8


def cheb_poly(n: int) -> list[int]:
    """Monomial coefficients [c_0, ..., c_n] of X_n, exact integers."""
    if n < 0 or n > MAX_POLY_DEGREE:
        raise ValueError(f"degree must lie in [0, {MAX_POLY_DEGREE}], got {n}")
    prev, cur = [1], [0, 1]
    if n == 0:
        return prev
    for _ in range(n - 1):
        nxt = [0] + cur
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


def poly_mul(f: list[int], g: list[int]) -> list[int]:
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return out


def cheb_values(n_max: int, x) -> np.ndarray:
    """Rows X_0(x), ..., X_{n_max}(x) computed by the value-domain recurrence."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = x
    for n in range(1, n_max):
        out[n + 1] = x * out[n] - out[n - 1]
    return out


def cheb_eval(n: int, t):
    """X_n(2 cos(pi t)).

    At t = 0 and t = 1 the recurrence lands on the limits n + 1 and
    (-1)^n (n + 1) exactly, since 2 cos(0) and 2 cos(pi) are exact in binary.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    values = cheb_values(n, 2.0 * np.cos(math.pi * np.asarray(t, dtype=float)))[n]
    return float(values) if np.ndim(t) == 0 else values


def cheb_eval_at(n: int, x):
    """X_n(x) for x in [-2, 2], same recurrence as :func:`cheb_eval`."""
    values = cheb_values(n, x)[n]
    return float(values) if np.ndim(x) == 0 else values


@dataclass
class ChebyshevExpansion:
    """Finite integer combination sum c_n X_n, stored without zero entries."""

    coeffs: dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.coeffs = {int(n): int(c) for n, c in sorted(self.coeffs.items()) if c != 0}

    @classmethod
    def basis(cls, n: int) -> "ChebyshevExpansion":
        return cls({n: 1})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChebyshevExpansion):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __mul__(self, other: "ChebyshevExpansion") -> "ChebyshevExpansion":
        acc: dict[int, int] = {}
        for n, a in self.coeffs.items():
            for m, b in other.coeffs.items():
                for k in _product_support(n, m):
                    acc[k] = acc.get(k, 0) + a * b
        return ChebyshevExpansion(acc)

    @property
    def degree(self) -> int:
        return max(self.coeffs, default=0)

    def to_monomial(self) -> list[int]:
        out = [0] * (self.degree + 1)
        for n, c in self.coeffs.items():
            for i, v in enumerate(cheb_poly(n)):
                out[i] += c * v
        while len(out) > 1 and out[-1] == 0:
            out.pop()
        return out

    def evaluate(self, t):
        """Value at x = 2 cos(pi t)."""
        if not self.coeffs:
            return 0.0 * np.asarray(t, dtype=float)
        rows = cheb_values(self.degree, 2.0 * np.cos(math.pi * np.asarray(t, dtype=float)))
        total = sum(c * rows[n] for n, c in self.coeffs.items())
        return float(total) if np.ndim(t) == 0 else total


def _product_support(n: int, m: int) -> range:
    if n > m:
        n, m = m, n
    return range(m - n, m + n + 1, 2)


def cheb_product(n: int, m: int) -> ChebyshevExpansion:
    """X_n X_m = sum_{i=0}^{min} X_{|m-n| + 2i}."""
    if n < 0 or m < 0:
        raise ValueError("indices must be nonnegative")
    return ChebyshevExpansion({k: 1 for k in _product_support(n, m)})


@dataclass(frozen=True)
class DTable:
    """Coefficients D(m_1, ..., m_r; m) of prod X_{m_i} = sum_m D(...; m) X_m."""

    args: tuple[int, ...]
    values: Mapping[int, int]

    def __getitem__(self, m: int) -> int:
        return self.values.get(m, 0)

    def to_json(self) -> dict[str, str]:
        return {str(m): str(v) for m, v in sorted(self.values.items())}


def d_table(args: Iterable[int]) -> DTable:
    args = tuple(int(a) for a in args)
    if not args:
        raise ValueError("d_table needs at least one argument")
    if any(a < 1 for a in args):
        raise ValueError("arguments must be positive integers")
    if len(args) > MAX_D_ARGS or sum(args) > MAX_D_TOTAL:
        raise ValueError(f"d_table limited to r <= {MAX_D_ARGS} and sum <= {MAX_D_TOTAL}")
    acc = ChebyshevExpansion.basis(args[0])
    for a in args[1:]:
        acc = acc * ChebyshevExpansion.basis(a)
    return DTable(args, dict(acc.coeffs))


class MeasureKind(str, enum.Enum):
    SATO_TATE = "sato_tate"
    MU_P = "mu_p"


@dataclass(frozen=True)
class MeasureSpec:
    kind: MeasureKind
    p: int | None = None

    @classmethod
    def sato_tate(cls) -> "MeasureSpec":
        return cls(MeasureKind.SATO_TATE)

    @classmethod
    def mu_p(cls, p: int) -> "MeasureSpec":
        if p < 2:
            raise ValueError("mu_p needs a prime p >= 2")
        return cls(MeasureKind.MU_P, int(p))


def plancherel_factor(p: int, t):
    """(p + 1) / ((p^(1/2) + p^(-1/2))^2 - 4 cos^2(pi t))."""
    c = np.cos(math.pi * np.asarray(t, dtype=float))
    return (p + 1) / ((math.sqrt(p) + 1 / math.sqrt(p)) ** 2 - 4.0 * c * c)


def measure_density(spec: MeasureSpec, t):
    t_arr = np.asarray(t, dtype=float)
    mu = 2.0 * np.sin(math.pi * t_arr) ** 2
    if spec.kind is MeasureKind.MU_P:
        mu = plancherel_factor(spec.p, t_arr) * mu
    return float(mu) if np.ndim(t) == 0 else mu


def integrate(spec: MeasureSpec, integrand) -> float:
    """int_0^1 integrand(t) d spec(t)."""
    return trapezoid_unit(lambda t: integrand(t) * measure_density(spec, t))


def measure_moment(spec: MeasureSpec, n: int) -> float:
    if n < 0 or n > MAX_MOMENT_INDEX:
        raise ValueError(f"moment index must lie in [0, {MAX_MOMENT_INDEX}]")
    return integrate(spec, lambda t: cheb_eval(n, t))


def z_m(u_coeffs, t):
    """Z_M(t) = sum_{m=1}^M U(m) X_{2m}(2 cos(pi t))."""
    M = len(u_coeffs)
    rows = cheb_values(2 * M, 2.0 * np.cos(math.pi * np.asarray(t, dtype=float)))
    total = np.zeros(np.shape(t))
    for m, u in enumerate(u_coeffs, start=1):
        total = total + u * rows[2 * m]
    return total


def zm_power_integral(weight, r: int, spec: MeasureSpec) -> float:
    """int_0^1 Z_M(t)^r d spec(t) for the coefficients of ``weight``."""
    if r < 1 or r > MAX_POWER:
        raise ValueError(f"power must lie in [1, {MAX_POWER}]")
    return integrate(spec, lambda t: z_m(weight.u_coeffs, t) ** r)
