"""Smooth test functions, their periodisations and Fourier-side functionals.

Two kernels are supported:

* ``gaussian``: Phi(t) = exp(-pi t^2), self-dual under
  hat(Phi)(xi) = int Phi(t) e^{-2 pi i xi t} dt, with hat(Phi)(t) << e^{-pi |t|^2}.
* ``fejer``: Phi(t) = (sin(pi t) / (pi t))^2 whose transform is the triangle
  max(0, 1 - |t|), supported on [-1, 1].

The periodised weight phi_L(t) = sum_m Phi(L(t + m)) has Fourier coefficients
hat(Phi)(m / L) / L, and everything here is computed from that side.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._quadrature import trapezoid_unit

TAIL_TOLERANCE = 1e-12
EPSILON = 0.1
MAX_L = 8.0


class KernelKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    FEJER = "fejer"


@dataclass(frozen=True)
class SmoothKernel:
    """An even, real test function together with its Fourier transform.

    ``amplitude`` multiplies both Phi and hat(Phi); it is 1 for the catalogue
    kernels and only exists so that scale covariance can be exercised.
    """

    kind: KernelKind
    lam: float | None = None
    omega: float | None = None
    support_radius: float | None = None
    amplitude: float = 1.0

    @classmethod
    def gaussian(cls) -> "SmoothKernel":
        return cls(KernelKind.GAUSSIAN, lam=math.pi, omega=2.0)

    @classmethod
    def fejer(cls) -> "SmoothKernel":
        return cls(KernelKind.FEJER, support_radius=1.0)

    @classmethod
    def from_name(cls, name: str) -> "SmoothKernel":
        try:
            kind = KernelKind(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown kernel {name!r}; expected 'gaussian' or 'fejer'") from None
        return cls.gaussian() if kind is KernelKind.GAUSSIAN else cls.fejer()

    @property
    def name(self) -> str:
        return self.kind.value

    def scaled(self, factor: float) -> "SmoothKernel":
        return replace(self, amplitude=self.amplitude * factor)

    def phi(self, t):
        """Phi(t), evaluated through |t| so that evenness is exact."""
        s = np.abs(np.asarray(t, dtype=float))
        if self.kind is KernelKind.GAUSSIAN:
            out = np.exp(-math.pi * s * s)
        else:
            out = np.sinc(s) ** 2
        return _like(t, self.amplitude * out)

    def phi_hat(self, t):
        """hat(Phi)(t); exactly zero outside the support for the Fejer kernel."""
        s = np.abs(np.asarray(t, dtype=float))
        if self.kind is KernelKind.GAUSSIAN:
            out = np.exp(-math.pi * s * s)
        else:
            out = np.maximum(0.0, 1.0 - s)
        return _like(t, self.amplitude * out)


def _like(t, values: np.ndarray):
    return float(values) if np.ndim(t) == 0 else values


def kernel_phi(kernel: SmoothKernel, t):
    return kernel.phi(t)


def kernel_phi_hat(kernel: SmoothKernel, t):
    return kernel.phi_hat(t)


def _check_L(L: float) -> None:
    if not L >= 1:
        raise ValueError(f"localisation scale L must be >= 1, got {L}")


@functools.lru_cache(maxsize=256)
def fourier_terms(kernel: SmoothKernel, L: float) -> int:
    """Largest frequency kept when synthesising phi_L from its Fourier series.

    For the Fejer kernel this is the last nonzero coefficient (the series is
    finite); for the Gaussian it is the first index whose discarded two-sided
    tail falls below ``TAIL_TOLERANCE``.
    """
    _check_L(L)
    if kernel.kind is KernelKind.FEJER:
        return max(0, math.ceil(kernel.support_radius * L) - 1)
    m = 0
    while True:
        tail = 2.0 / L * _explicit_tail(lambda j: kernel.phi_hat(j / L), m + 1)
        if tail < TAIL_TOLERANCE:
            return m
        m += 1


def _explicit_tail(term, start: int) -> float:
    """Sum |term(j)| for j >= start until the terms underflow to nothing."""
    total = 0.0
    j = start
    while True:
        v = abs(term(j))
        if v == 0.0 or v < total * 1e-17 or v < 1e-300:
            return total + v
        total += v
        j += 1


def periodic_weight_eval(kernel: SmoothKernel, L: float, t):
    """phi_L(t) = (1/L) sum_{|m| <= M*} hat(Phi)(m/L) e(m t)."""
    _check_L(L)
    m_star = fourier_terms(kernel, L)
    t_arr = np.asarray(t, dtype=float)
    out = np.full(t_arr.shape, float(kernel.phi_hat(0.0)))
    for m in range(1, m_star + 1):
        out = out + 2.0 * float(kernel.phi_hat(m / L)) * np.cos(2.0 * math.pi * m * t_arr)
    return _like(t, out / L)


def u_coeff(kernel: SmoothKernel, L: float, m: int) -> float:
    """U(m) = (hat(Phi)(m/L) - hat(Phi)((m+1)/L)) / L."""
    _check_L(L)
    if m < 1:
        raise ValueError("U(m) is defined for m >= 1")
    return (float(kernel.phi_hat(m / L)) - float(kernel.phi_hat((m + 1) / L))) / L


def u_tail(kernel: SmoothKernel, L: float, M: int) -> float:
    """sum_{m > M} |U(m)|, summed explicitly."""
    if kernel.kind is KernelKind.FEJER:
        hi = math.ceil(kernel.support_radius * L)
        return sum(abs(u_coeff(kernel, L, m)) for m in range(M + 1, hi + 1))
    return _explicit_tail(lambda m: u_coeff(kernel, L, m), M + 1)


def cutoff_M(kernel: SmoothKernel, L: float, x: float, epsilon: float = EPSILON) -> int:
    """Fourier cutoff: ceil(B L) for compact support, ceil(L (log x)^(1/omega + eps))
    for Gaussian decay.

    The Gaussian value is extended (only ever for very small x) until the
    explicit tail sum_{m > M} |U(m)| is below ``TAIL_TOLERANCE``.
    """
    if not x > 6:
        raise ValueError(f"x must exceed 6, got {x}")
    _check_L(L)
    if kernel.kind is KernelKind.FEJER:
        return max(1, math.ceil(kernel.support_radius * L))
    M = max(1, math.ceil(L * math.log(x) ** (1.0 / kernel.omega + epsilon)))
    while u_tail(kernel, L, M) >= TAIL_TOLERANCE * kernel.amplitude:
        M += 1
    return M


def mean_value(kernel: SmoothKernel, L: float) -> float:
    """int_0^1 phi_L mu dt = (hat(Phi)(0) - hat(Phi)(1/L)) / L."""
    _check_L(L)
    return (float(kernel.phi_hat(0.0)) - float(kernel.phi_hat(1.0 / L))) / L


def variance_series(kernel: SmoothKernel, L: float, M: int) -> float:
    return math.fsum(u_coeff(kernel, L, m) ** 2 for m in range(1, M + 1))


def _sato_tate(t: np.ndarray) -> np.ndarray:
    return 2.0 * np.sin(math.pi * t) ** 2


def variance_quadrature(kernel: SmoothKernel, L: float) -> float:
    """int phi_L^2 mu - (int phi_L mu)^2 by the periodic trapezoid rule."""
    _check_L(L)
    second = trapezoid_unit(lambda t: periodic_weight_eval(kernel, L, t) ** 2 * _sato_tate(t))
    first = trapezoid_unit(lambda t: periodic_weight_eval(kernel, L, t) * _sato_tate(t))
    return second - first * first


def parseval_gap(kernel: SmoothKernel, L: float) -> float:
    """|sum_m |hat(phi_L)(m)|^2 - int_0^1 phi_L^2| as a self-check of the synthesis."""
    m_star = fourier_terms(kernel, L)
    coeffs = [float(kernel.phi_hat(m / L)) ** 2 for m in range(1, m_star + 1)]
    spectral = (float(kernel.phi_hat(0.0)) ** 2 + 2.0 * math.fsum(coeffs)) / L**2
    spatial = trapezoid_unit(lambda t: periodic_weight_eval(kernel, L, t) ** 2)
    return abs(spectral - spatial)


@dataclass(frozen=True)
class PeriodicWeight:
    """phi_L with its coefficient sequence U(1..M), mean and variance."""

    kernel: SmoothKernel
    L: float
    M: int
    u_coeffs: tuple[float, ...] = field(repr=False)
    mean: float
    variance: float

    def __call__(self, t):
        return periodic_weight_eval(self.kernel, self.L, t)

    @property
    def degenerate(self) -> bool:
        return self.variance <= 0.0


def periodic_weight(kernel: SmoothKernel, L: float, x: float) -> PeriodicWeight:
    M = cutoff_M(kernel, L, x)
    u = tuple(u_coeff(kernel, L, m) for m in range(1, M + 1))
    return PeriodicWeight(
        kernel=kernel,
        L=float(L),
        M=M,
        u_coeffs=u,
        mean=mean_value(kernel, L),
        variance=math.fsum(c * c for c in u),
    )
