"""Smoothed Sato-Tate counts over a curve family and their normalised moments.

For a curve E and window (x/2, x] the smoothed count is

    N(E) = sum_{p good} phi_L(theta_E(p)),

and the statistic whose moments are compared with the standard Gaussian is

    e(E) = (N(E) - pi~(x) * mean) / sqrt(pi~(x) * variance),

pi~(x) counting all window primes (bad primes included, exactly as the
centering term is usually written).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .chebyshev import cheb_poly, cheb_values
from .curves import ApCache, Curve, _resolve_threads, format_x, legendre_table, theta_array
from .kernels import PeriodicWeight, periodic_weight_eval

MAX_R = 8
CHUNK = 256
HIST_BINS = 61
HIST_RANGE = (-4.0, 4.0)


class DegenerateVarianceError(ValueError):
    """The weight has zero variance, so errors cannot be normalised."""


def _curve_thetas(cache: ApCache, curve: Curve) -> np.ndarray:
    recs = [r for r in cache.records(curve) if r.theta_available]
    if not recs:
        return np.zeros(0)
    return theta_array(np.array([r.ap for r in recs]), np.array([r.p for r in recs]))


def n_phi_direct(curve: Curve, cache: ApCache, weight: PeriodicWeight) -> float:
    thetas = _curve_thetas(cache, curve)
    return math.fsum(np.atleast_1d(periodic_weight_eval(weight.kernel, weight.L, thetas)))


def n_phi_fourier(curve: Curve, cache: ApCache, weight: PeriodicWeight) -> float:
    """pi~_Delta * mean + sum_m U(m) sum_p X_{2m}(2 cos(pi theta_p))."""
    thetas = _curve_thetas(cache, curve)
    if thetas.size == 0:
        return 0.0
    rows = cheb_values(2 * weight.M, 2.0 * np.cos(math.pi * thetas))
    terms = [u * math.fsum(rows[2 * m]) for m, u in enumerate(weight.u_coeffs, start=1)]
    return thetas.size * weight.mean + math.fsum(terms)


def gaussian_moment(r: int) -> int:
    """E[Z^r] for Z ~ N(0, 1): zero for odd r, r! / ((r/2)! 2^(r/2)) otherwise."""
    if r < 0 or r > 64:
        raise ValueError("r must lie in [0, 64]")
    if r % 2:
        return 0
    h = r // 2
    return math.factorial(r) // (math.factorial(h) * 2**h)


@dataclass
class MomentReport:
    config: dict[str, Any]
    family_count: int
    window_count: int
    mean: float
    variance: float
    moments: dict[int, tuple[float, int]]
    per_curve_errors: list[float] | None = field(default=None, repr=False)

    def histogram(self) -> dict[str, list]:
        """61 uniform bins on [-4, 4] framed by an underflow and an overflow bin."""
        if self.per_curve_errors is None:
            raise ValueError("report was built without per-curve errors")
        edges = np.linspace(*HIST_RANGE, HIST_BINS + 1)
        errs = np.asarray(self.per_curve_errors)
        inner, _ = np.histogram(errs[(errs >= edges[0]) & (errs <= edges[-1])], bins=edges)
        counts = [int((errs < edges[0]).sum()), *map(int, inner), int((errs > edges[-1]).sum())]
        return {"binEdges": [float(e) for e in edges], "counts": counts}

    def to_json(self, histogram: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "config": self.config,
            "familyCount": self.family_count,
            "windowCount": self.window_count,
            "mean": self.mean,
            "variance": self.variance,
            "moments": [
                {"r": r, "empirical": emp, "gaussian": g} for r, (emp, g) in sorted(self.moments.items())
            ],
        }
        if histogram:
            out["histogram"] = self.histogram()
        return out


def _chunk_errors(
    ap_rows: np.ndarray, good: np.ndarray, primes: np.ndarray, weight: PeriodicWeight, centre: float, scale: float
) -> list[float]:
    thetas = theta_array(ap_rows, primes[None, :])
    phi = np.where(good, periodic_weight_eval(weight.kernel, weight.L, thetas), 0.0)
    return [(math.fsum(row) - centre) / scale for row in phi]


def normalized_errors(cache: ApCache, weight: PeriodicWeight, threads: int = 1) -> list[float]:
    """e(a, b) for every curve of the cache, in the cache's (a, b) order.

    Curves are processed in fixed chunks of ``CHUNK`` rows; threads only
    decide which worker evaluates a chunk, never how a chunk is formed.
    """
    if weight.degenerate:
        raise DegenerateVarianceError(
            f"variance of the {weight.kernel.name} weight at L={weight.L:g} is zero "
            "(phi_L is constant), normalised errors are undefined"
        )
    window = len(cache.primes)
    centre = window * weight.mean
    scale = math.sqrt(window * weight.variance)
    good = cache.good_mask()
    bounds = [(i, min(i + CHUNK, len(cache.curves))) for i in range(0, len(cache.curves), CHUNK)]

    def work(span: tuple[int, int]) -> list[float]:
        lo, hi = span
        return _chunk_errors(cache.ap[lo:hi], good[lo:hi], cache.primes, weight, centre, scale)

    workers = _resolve_threads(threads)
    if workers == 1:
        parts = [work(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, bounds))
    return [e for part in parts for e in part]


def family_moments(
    cache: ApCache,
    weight: PeriodicWeight,
    r_max: int = 4,
    threads: int = 1,
    keep_errors: bool = False,
) -> MomentReport:
    if not 1 <= r_max <= MAX_R:
        raise ValueError(f"r_max must lie in [1, {MAX_R}]")
    errors = normalized_errors(cache, weight, threads)
    n = len(errors)
    moments = {}
    for r in range(1, r_max + 1):
        # fsum is correctly rounded, hence independent of grouping
        moments[r] = (math.fsum(e**r for e in errors) / n, gaussian_moment(r))
    config = {
        "kernel": weight.kernel.name,
        "L": weight.L,
        "x": format_x(cache.x),
        "A": cache.A,
        "B": cache.B,
        "M": weight.M,
    }
    return MomentReport(
        config=config,
        family_count=n,
        window_count=len(cache.primes),
        mean=weight.mean,
        variance=weight.variance,
        moments=moments,
        per_curve_errors=errors if keep_errors else None,
    )


def _trace_counts(p: int) -> dict[int, int]:
    """Multiplicity of each a_p over 1 <= a, b <= p with p not dividing a b Delta."""
    chi = legendre_table(p)
    xs = np.arange(p, dtype=np.int64)
    cubes = xs * xs % p * xs % p
    counts: dict[int, int] = {}
    bs = np.arange(1, p + 1, dtype=np.int64)
    for a in range(1, p + 1):
        if a % p == 0:
            continue
        vals = (cubes[None, :] + a * xs[None, :] + bs[:, None]) % p
        traces = -chi[vals].sum(axis=1, dtype=np.int64)
        for b, t in zip(bs, traces):
            if b % p == 0 or (4 * a**3 + 27 * int(b) ** 2) % p == 0:
                continue
            counts[int(t)] = counts.get(int(t), 0) + 1
    return counts


def _s_rational(p: int, alpha: int) -> Fraction:
    """R with S(p^alpha) = R (alpha even) or R / sqrt(p) (alpha odd).

    X_alpha has the parity of alpha, so X_alpha(t / sqrt p) is a rational
    number, or a rational multiple of 1 / sqrt(p).
    """
    if p > 500 or not 0 <= alpha <= 12:
        raise ValueError("s_average supports p <= 500 and 0 <= alpha <= 12")
    if alpha == 0:
        return Fraction(1)
    poly = cheb_poly(alpha)
    total = Fraction(0)
    for t, c in _trace_counts(p).items():
        total += c * sum(
            Fraction(poly[j] * t**j, p ** (j // 2)) for j in range(alpha % 2, alpha + 1, 2)
        )
    return total / (p * p)


def s_average(p: int, alpha: int) -> float:
    """S(p^alpha): mean of X_alpha(a_p / sqrt p) over residue pairs (a, b), with
    pairs where p divides a b Delta(a, b) contributing zero but still counted
    in the 1/p^2 normalisation."""
    r = _s_rational(p, alpha)
    return float(r) if alpha % 2 == 0 else float(r) / math.sqrt(p)


def s_average_exact(p: int, alpha: int) -> Fraction:
    if alpha % 2:
        raise ValueError("S(p^alpha) is irrational for odd alpha")
    return _s_rational(p, alpha)
