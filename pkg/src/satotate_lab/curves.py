"""Point counting for the family y^2 = x^3 + a x + b over prime fields.

For a prime p > 3 the trace of Frobenius is

    a_p = -sum_{x mod p} chi_p(x^3 + a x + b),

chi_p the Legendre symbol, so #E(F_p) = p + 1 - a_p.  Sweeps evaluate this
character sum with one lookup table of quadratic residues per prime, shared
read-only by all worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAX_TABLE_PRIME = 2**26
SEGMENT_THRESHOLD = 10**6
SEGMENT_SIZE = 2**20
CACHE_MAGIC = "# satotate-lab apcache v1"
A_CHUNK = 8


class CacheFormatError(ValueError):
    """Raised when a cache file does not match the apcache v1 layout."""


@dataclass(frozen=True)
class Curve:
    a: int
    b: int

    @property
    def delta(self) -> int:
        return 4 * self.a**3 + 27 * self.b**2

    @property
    def admissible(self) -> bool:
        return self.a != 0 and self.b != 0 and self.delta != 0


@dataclass(frozen=True)
class ApRecord:
    p: int
    ap: int
    theta_available: bool

    @property
    def normalized(self) -> float:
        return self.ap / math.sqrt(self.p)


# --- arithmetic -----------------------------------------------------------


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a | n) for odd n >= 1."""
    if n < 1 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs odd positive n, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def square_table(p: int) -> np.ndarray:
    """Boolean mask of the squares mod p (0 included)."""
    if p > MAX_TABLE_PRIME:
        raise MemoryError(f"square table for p = {p} exceeds the 2^26 cap")
    if p < 3 or p % 2 == 0:
        raise ValueError(f"square table needs an odd prime, got {p}")
    mask = np.zeros(p, dtype=bool)
    r = np.arange((p - 1) // 2 + 1, dtype=np.int64)
    mask[(r * r) % p] = True
    return mask


def legendre_table(p: int) -> np.ndarray:
    """chi_p as an int8 lookup: 0 at 0, +1 on nonzero squares, -1 otherwise."""
    chi = np.where(square_table(p), 1, -1).astype(np.int8)
    chi[0] = 0
    return chi


def ap(curve: Curve, p: int, chi: np.ndarray | None = None) -> ApRecord:
    if chi is None:
        chi = legendre_table(p)
    xs = np.arange(p, dtype=np.int64)
    vals = (xs * xs % p * xs + (curve.a % p) * xs + curve.b % p) % p
    trace = -int(chi[vals].sum(dtype=np.int64))
    return ApRecord(p, trace, curve.delta % p != 0)


def ap_jacobi(curve: Curve, p: int) -> int:
    """Same trace via :func:`jacobi`; a slow reference path."""
    return -sum(jacobi(x**3 + curve.a * x + curve.b, p) for x in range(p))


def theta(rec: ApRecord) -> float:
    """Angle theta in [0, 1] with a_p / sqrt(p) = 2 cos(pi theta)."""
    if not rec.theta_available:
        raise ValueError(f"no Sato-Tate angle at bad prime p = {rec.p}")
    c = rec.ap / (2.0 * math.sqrt(rec.p))
    return math.acos(min(1.0, max(-1.0, c))) / math.pi


def theta_array(ap_values: np.ndarray, primes: np.ndarray) -> np.ndarray:
    c = ap_values / (2.0 * np.sqrt(primes.astype(float)))
    return np.arccos(np.clip(c, -1.0, 1.0)) / math.pi


# --- primes ---------------------------------------------------------------


def primes_up_to(n: int) -> np.ndarray:
    n = int(n)
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    if n > SEGMENT_THRESHOLD:
        return _segmented_primes(n)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, math.isqrt(n) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return np.flatnonzero(sieve).astype(np.int64)


def _segmented_primes(n: int) -> np.ndarray:
    base = primes_up_to(math.isqrt(n))
    chunks = [base]
    lo = math.isqrt(n) + 1
    while lo <= n:
        hi = min(lo + SEGMENT_SIZE, n + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for q in base:
            q = int(q)
            start = max(q * q, -(-lo // q) * q)
            if start >= hi:
                continue
            seg[start - lo :: q] = False
        chunks.append(np.flatnonzero(seg).astype(np.int64) + lo)
        lo = hi
    return np.concatenate(chunks)


@dataclass(frozen=True)
class PrimeWindow:
    """Primes in (x/2, x] (``dyadic``) or all primes <= x."""

    x: float
    dyadic: bool
    primes: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.primes)

    @property
    def kind(self) -> str:
        return "dyadic" if self.dyadic else "full"


def prime_window(x: float, dyadic: bool = True) -> PrimeWindow:
    if not x > 6:
        raise ValueError(f"x must exceed 6, got {x}")
    ps = primes_up_to(math.floor(x))
    if dyadic:
        ps = ps[ps > x / 2]
    return PrimeWindow(float(x), bool(dyadic), tuple(int(p) for p in ps))


# --- family sweep ---------------------------------------------------------


def family(A: int, B: int) -> list[Curve]:
    """Admissible curves 0 < |a| <= A, 0 < |b| <= B, ascending in (a, b)."""
    return [
        c
        for a in range(-A, A + 1)
        for b in range(-B, B + 1)
        if (c := Curve(a, b)).admissible
    ]


@dataclass
class ApCache:
    """a_p for every admissible curve of a box family at every window prime.

    ``ap`` is a (len(curves), len(primes)) integer matrix; row order is
    ascending (a, b), column order ascending p.
    """

    A: int
    B: int
    x: float
    window: str
    curves: list[Curve]
    primes: np.ndarray
    ap: np.ndarray

    @property
    def deltas(self) -> np.ndarray:
        return np.array([c.delta for c in self.curves], dtype=object)

    def good_mask(self) -> np.ndarray:
        """True where p does not divide the discriminant."""
        mask = np.empty(self.ap.shape, dtype=bool)
        for i, c in enumerate(self.curves):
            d = c.delta
            mask[i] = [d % int(p) != 0 for p in self.primes]
        return mask

    def index_of(self, curve: Curve) -> int:
        try:
            return self._index[curve]
        except AttributeError:
            self._index = {c: i for i, c in enumerate(self.curves)}
            return self._index[curve]

    def records(self, curve: Curve) -> list[ApRecord]:
        try:
            i = self.index_of(curve)
        except KeyError:
            raise KeyError(f"curve {curve} is not covered by this cache") from None
        d = curve.delta
        return [
            ApRecord(int(p), int(v), d % int(p) != 0) for p, v in zip(self.primes, self.ap[i])
        ]


def _resolve_threads(threads: int) -> int:
    if threads <= 0:
        return os.cpu_count() or 1
    return threads


def _prime_tables(primes) -> list[tuple[int, np.ndarray, np.ndarray]]:
    tables = []
    for p in primes:
        if p < 5:
            raise ValueError("point counting here assumes p > 3")
        xs = np.arange(p, dtype=np.int64)
        tables.append((p, legendre_table(p), xs * xs % p * xs % p))
    return tables


def _sweep_rows(
    a_values: list[int], b_values: np.ndarray, tables: list[tuple[int, np.ndarray, np.ndarray]]
) -> np.ndarray:
    """a_p for the grid a_values x b_values x primes, shape (na, nb, np).

    For fixed p and a, with h_a[v] = #{x : x^3 + a x = v mod p},
    sum_x chi(x^3 + a x + b) = sum_v h_a[v] chi(v + b), so the whole (a, b)
    grid is one product of a histogram matrix with a matrix of shifted
    character rows.  Entries are bounded by p, so float64 products are exact.
    """
    out = np.empty((len(a_values), len(b_values), len(tables)), dtype=np.int64)
    for j, (p, chi, cubes) in enumerate(tables):
        xs = np.arange(p, dtype=np.int64)
        hist = np.empty((len(a_values), p))
        for i, a in enumerate(a_values):
            hist[i] = np.bincount((cubes + (a % p) * xs) % p, minlength=p)
        shifts = chi[(np.arange(p, dtype=np.int64)[None, :] + (b_values % p)[:, None]) % p]
        sums = hist @ shifts.T.astype(float)
        out[:, :, j] = -np.rint(sums).astype(np.int64)
    return out


def sweep(A: int, B: int, window: PrimeWindow, threads: int = 1) -> ApCache:
    """Trace table for the family 0 < |a| <= A, 0 < |b| <= B over ``window``.

    Work is split over fixed chunks of a-values; every chunk is exact integer
    arithmetic, so the result does not depend on the number of workers.
    """
    curves = family(A, B)
    if not curves:
        raise ValueError(f"family A={A}, B={B} has no admissible curves")
    tables = _prime_tables(window.primes)
    a_values = [a for a in range(-A, A + 1) if a != 0]
    b_values = np.array([b for b in range(-B, B + 1) if b != 0], dtype=np.int64)
    chunks = [a_values[i : i + A_CHUNK] for i in range(0, len(a_values), A_CHUNK)]
    workers = _resolve_threads(threads)
    if workers == 1:
        parts = [_sweep_rows(ch, b_values, tables) for ch in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ch: _sweep_rows(ch, b_values, tables), chunks))
    grid = np.concatenate(parts, axis=0)
    a_pos = {a: i for i, a in enumerate(a_values)}
    b_pos = {int(b): i for i, b in enumerate(b_values)}
    rows = np.array([grid[a_pos[c.a], b_pos[c.b]] for c in curves], dtype=np.int64)
    return ApCache(
        A=A,
        B=B,
        x=window.x,
        window=window.kind,
        curves=curves,
        primes=np.array(window.primes, dtype=np.int64),
        ap=rows.reshape(len(curves), window.count),
    )


# --- persistence ----------------------------------------------------------


def format_x(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def cache_header(A: int, B: int, x: float, window: str) -> str:
    return f"{CACHE_MAGIC} A={A} B={B} x={format_x(x)} window={window}"


def write_cache(cache: ApCache, path: str | os.PathLike) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    primes = [str(int(p)) for p in cache.primes]
    lines = [cache_header(cache.A, cache.B, cache.x, cache.window), "a,b,p,ap"]
    for curve, row in zip(cache.curves, cache.ap):
        prefix = f"{curve.a},{curve.b},"
        lines.extend(f"{prefix}{p},{int(v)}" for p, v in zip(primes, row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _parse_header(line: str) -> dict[str, str]:
    if not line.startswith(CACHE_MAGIC):
        raise CacheFormatError(f"missing apcache v1 header: {line!r}")
    fields = dict(tok.split("=", 1) for tok in line[len(CACHE_MAGIC) :].split())
    if set(fields) != {"A", "B", "x", "window"} or fields["window"] not in ("dyadic", "full"):
        raise CacheFormatError(f"malformed apcache header: {line!r}")
    return fields


def read_cache(path: str | os.PathLike) -> ApCache:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        header = _parse_header(fh.readline().rstrip("\n"))
        if fh.readline().strip() != "a,b,p,ap":
            raise CacheFormatError(f"{path}: expected column header 'a,b,p,ap'")
        data = np.loadtxt(fh, delimiter=",", dtype=np.int64, ndmin=2)
    A, B = int(header["A"]), int(header["B"])
    x = float(header["x"])
    curves = family(A, B)
    primes = np.array(prime_window(x, header["window"] == "dyadic").primes, dtype=np.int64)
    n_c, n_p = len(curves), len(primes)
    if data.shape != (n_c * n_p, 4):
        raise CacheFormatError(f"{path}: expected {n_c * n_p} rows, found {data.shape[0]}")
    expected_ab = np.array([(c.a, c.b) for c in curves], dtype=np.int64)
    if not (
        np.array_equal(data[:, :2], np.repeat(expected_ab, n_p, axis=0))
        and np.array_equal(data[:, 2], np.tile(primes, n_c))
    ):
        raise CacheFormatError(f"{path}: rows do not cover the family x window product in order")
    return ApCache(
        A=A,
        B=B,
        x=x,
        window=header["window"],
        curves=curves,
        primes=primes,
        ap=data[:, 3].reshape(n_c, n_p).copy(),
    )
