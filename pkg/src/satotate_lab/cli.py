"""Command-line runner: ``satotate-lab <command> [options]``.

Exit codes: 0 success, 1 configuration or usage error, 2 a mathematical
invariant failed, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import acceptance
from . import curves as cv
from . import elliptic_stats as es
from . import kernels as kn
from . import modular_forms as mf

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_IO = 0, 1, 2, 3
COMMANDS = ("kernels", "sweep", "moments", "modular-check", "selftest")
DUALITY_TOLERANCE = 1e-10
HECKE_TOLERANCE = 1e-9
TRACE_INDICES = tuple(range(1, 13))


class ConfigError(Exception):
    pass


class InvariantError(Exception):
    def __init__(self, message: str, report: dict[str, Any] | None = None):
        super().__init__(message)
        self.report = report


@dataclass
class RunConfig:
    command: str
    kernel: str = "gaussian"
    L: float = 2.0
    x: float = 2000.0
    A: int = 25
    B: int = 25
    r_max: int = 4
    threads: int = 1
    cache_path: Path | None = None
    out_path: Path | None = None
    histogram: bool = False
    figure_path: Path | None = None
    no_figure: bool = False
    k: int = 12
    n_max: int = 10_000

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.command == "selftest":
            return
        if not (math.isfinite(self.x) and self.x > 6):
            raise ConfigError(f"--x must be a finite number greater than 6, got {self.x}")
        if self.command in ("kernels", "moments", "modular-check"):
            try:
                kn.SmoothKernel.from_name(self.kernel)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            if not 1 <= self.L <= kn.MAX_L:
                raise ConfigError(f"--L must lie in [1, {kn.MAX_L:g}], got {self.L}")
        if self.command in ("sweep", "moments"):
            if self.A < 1 or self.B < 1:
                raise ConfigError("--A and --B must be positive integers")
            if self.threads < 0:
                raise ConfigError("--threads must be >= 0 (0 = one per CPU)")
        if self.command == "moments" and not 1 <= self.r_max <= es.MAX_R:
            raise ConfigError(f"--r-max must lie in [1, {es.MAX_R}]")
        if self.command == "modular-check":
            if self.k not in mf.SUPPORTED_WEIGHTS:
                raise ConfigError(
                    f"weight {self.k} unsupported: need dim S_k(SL2(Z)) = 1, k in {sorted(mf.SUPPORTED_WEIGHTS)}"
                )
            if not 1 <= self.n_max <= mf.MAX_NMAX:
                raise ConfigError(f"--nmax must lie in [1, {mf.MAX_NMAX}]")
            if self.x > self.n_max:
                raise ConfigError(f"--x = {self.x:g} exceeds --nmax = {self.n_max}")

    @property
    def weight_kernel(self) -> kn.SmoothKernel:
        return kn.SmoothKernel.from_name(self.kernel)

    def default_cache(self) -> Path:
        base = os.environ.get("SATOTATE_CACHE_DIR") or Path.home() / ".cache" / "satotate-lab"
        return Path(base) / f"apcache_A{self.A}_B{self.B}_x{cv.format_x(self.x)}_dyadic.csv"

    def figure_target(self) -> Path | None:
        """Explicit --figure, else a PNG next to --out, unless --no-figure."""
        if self.no_figure:
            return None
        if self.figure_path is not None:
            return self.figure_path
        if self.out_path is not None:
            return self.out_path.with_suffix(".png")
        return None


# --- output ---------------------------------------------------------------


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def emit(cfg: RunConfig, report: dict[str, Any]) -> None:
    text = dump_json(report)
    if cfg.out_path is None:
        sys.stdout.write(text)
    else:
        cfg.out_path.parent.mkdir(parents=True, exist_ok=True)
        cfg.out_path.write_text(text, encoding="utf-8")


def _render(cfg: RunConfig, plot: str, *args: Any) -> None:
    target = cfg.figure_target()
    if target is not None:
        # imported lazily so JSON-only runs never load matplotlib
        from . import plotting

        getattr(plotting, plot)(*args, target)


# --- commands -------------------------------------------------------------


def cmd_kernels(cfg: RunConfig) -> dict[str, Any]:
    kernel = cfg.weight_kernel
    weight = kn.periodic_weight(kernel, cfg.L, cfg.x)
    quad = kn.variance_quadrature(kernel, cfg.L)
    report = {
        "kernel": kernel.name,
        "L": cfg.L,
        "x": cv.format_x(cfg.x),
        "mean": weight.mean,
        "varianceSeries": weight.variance,
        "varianceQuadrature": quad,
        "M": weight.M,
        "U": list(weight.u_coeffs),
        "degenerate": weight.degenerate,
    }
    _render(cfg, "plot_weight", weight)
    if not abs(weight.variance - quad) < DUALITY_TOLERANCE:
        raise InvariantError(f"variance duality violated: |{weight.variance} - {quad}| >= {DUALITY_TOLERANCE}", report)
    return report


def _build_cache(cfg: RunConfig) -> tuple[cv.ApCache, Path]:
    path = cfg.cache_path or cfg.default_cache()
    cache = cv.sweep(cfg.A, cfg.B, cv.prime_window(cfg.x), threads=cfg.threads)
    try:
        cv.write_cache(cache, path)
    except OSError as exc:
        raise OSError(f"cannot write cache {path}: {exc.strerror or exc}") from exc
    return cache, path


def cmd_sweep(cfg: RunConfig) -> dict[str, Any]:
    cache, path = _build_cache(cfg)
    return {
        "cache": str(path),
        "A": cache.A,
        "B": cache.B,
        "x": cv.format_x(cache.x),
        "window": cache.window,
        "curves": len(cache.curves),
        "primes": len(cache.primes),
        "rows": int(cache.ap.size),
    }


def _load_or_build(cfg: RunConfig) -> cv.ApCache:
    path = cfg.cache_path or cfg.default_cache()
    if not path.exists():
        return _build_cache(cfg)[0]
    try:
        cache = cv.read_cache(path)
    except cv.CacheFormatError as exc:
        raise OSError(f"unreadable cache {path}: {exc}") from exc
    if (cache.A, cache.B, cache.x, cache.window) != (cfg.A, cfg.B, float(cfg.x), "dyadic"):
        raise ConfigError(
            f"cache {path} holds A={cache.A} B={cache.B} x={cv.format_x(cache.x)} window={cache.window}, "
            f"not the requested A={cfg.A} B={cfg.B} x={cv.format_x(cfg.x)} window=dyadic"
        )
    return cache


def cmd_moments(cfg: RunConfig) -> dict[str, Any]:
    weight = kn.periodic_weight(cfg.weight_kernel, cfg.L, cfg.x)
    if weight.degenerate:
        raise InvariantError(
            f"{weight.kernel.name} weight at L={cfg.L:g} has zero variance; normalised errors are undefined"
        )
    cache = _load_or_build(cfg)
    want_figure = cfg.figure_target() is not None
    report = es.family_moments(
        cache, weight, r_max=cfg.r_max, threads=cfg.threads, keep_errors=cfg.histogram or want_figure
    )
    _render(cfg, "plot_error_histogram", report)
    return report.to_json(histogram=cfg.histogram)


def _hecke_max_error(form: mf.EigenformQExpansion) -> float:
    worst = 0.0
    half = (form.weight - 1) / 2
    for p in map(int, cv.primes_up_to(50)):
        for m in range(6):
            if p**m > form.n_max:
                break
            exact = mf.hecke_prime_power(form, p, m)
            if m and exact != form.c(p**m):
                return math.inf
            worst = max(worst, abs(exact / p ** (m * half) - mf.af_prime_power(form, p, m)))
    return worst


def cmd_modular_check(cfg: RunConfig) -> dict[str, Any]:
    form = mf.eigenform(cfg.k, cfg.n_max)
    weight = kn.periodic_weight(cfg.weight_kernel, cfg.L, cfg.x)
    primes = [int(p) for p in cv.primes_up_to(math.floor(cfg.x))]
    defect = mf.n_phi_f_identity_check(form, cfg.x, weight)
    deligne = form.deligne_ok()
    hecke = _hecke_max_error(form)
    residuals = [mf.trace_residual(cfg.k, n, cfg.n_max) for n in TRACE_INDICES if n <= cfg.n_max]
    report = {
        "k": cfg.k,
        "kernel": weight.kernel.name,
        "L": cfg.L,
        "x": cv.format_x(cfg.x),
        "nmax": cfg.n_max,
        "M": weight.M,
        "identityDefect": defect,
        "identityBound": 1e-8 * len(primes),
        "deligneOk": deligne,
        "heckeChebyshevMaxErr": hecke,
        "traceResiduals": [
            {"n": r.n, "lhs": r.lhs, "mainTerm": r.main_term, "residual": r.residual, "divisorBoundOk": r.divisor_bound_ok}
            for r in residuals
        ],
    }
    if deligne:
        thetas = np.array([mf.theta_f(form, p) for p in primes])
        _render(cfg, "plot_angles", thetas, f"k = {cfg.k}, p <= {cv.format_x(cfg.x)}")
    failures = []
    if not defect < 1e-8 * len(primes):
        failures.append(f"identity defect {defect:.3e}")
    if not deligne:
        failures.append("Deligne bound")
    if not hecke < HECKE_TOLERANCE:
        failures.append(f"Hecke/Chebyshev error {hecke:.3e}")
    if failures:
        raise InvariantError("invariant(s) failed: " + ", ".join(failures), report)
    return report


def cmd_selftest(cfg: RunConfig) -> dict[str, Any]:
    results = []
    for number, *_ in acceptance.CRITERIA:
        res = acceptance.run_criterion(number)
        print(res.line(), file=sys.stderr if cfg.out_path is None else sys.stdout, flush=True)
        results.append(res)
    report = {
        "passed": sum(r.passed for r in results),
        "total": len(results),
        "criteria": [{"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail} for r in results],
    }
    if not all(r.passed for r in results):
        raise InvariantError(f"{len(results) - report['passed']} acceptance criteria failed", report)
    return report


HANDLERS = {
    "kernels": cmd_kernels,
    "sweep": cmd_sweep,
    "moments": cmd_moments,
    "modular-check": cmd_modular_check,
    "selftest": cmd_selftest,
}


# --- argument parsing -----------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="satotate-lab", description="Smoothed Sato-Tate statistics at desk scale.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser, x_default: float) -> None:
        p.add_argument("--x", type=float, default=x_default, help="prime bound (> 6)")
        p.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")

    def weight_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--kernel", default="gaussian", help="gaussian | fejer")
        p.add_argument("--L", type=float, default=2.0, help="dilation, 1 <= L <= 8")

    def family_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--A", type=int, default=25)
        p.add_argument("--B", type=int, default=25)
        p.add_argument("--threads", type=int, default=1, help="worker threads, 0 = one per CPU")
        p.add_argument("--cache", type=Path, help="a_p cache CSV (default under $SATOTATE_CACHE_DIR)")

    def figure_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--figure", type=Path, help="PNG path (default: next to --out)")
        p.add_argument("--no-figure", action="store_true", help="do not render a figure")

    p = sub.add_parser("kernels", help="weight coefficients and variance duality")
    weight_args(p)
    common(p, 2000)
    figure_args(p)

    p = sub.add_parser("sweep", help="compute and cache a_p for a curve family")
    family_args(p)
    common(p, 2000)

    p = sub.add_parser("moments", help="normalised moments of smoothed counts over a family")
    weight_args(p)
    family_args(p)
    common(p, 2000)
    p.add_argument("--r-max", type=int, default=4)
    p.add_argument("--histogram", action="store_true", help="add binned normalised errors to the report")
    figure_args(p)

    p = sub.add_parser("modular-check", help="identity checks for a level-1 eigenform")
    weight_args(p)
    common(p, 500)
    p.add_argument("--k", type=int, default=12, help="weight in {12, 16, 18, 20, 22, 26}")
    p.add_argument("--nmax", type=int, default=10_000, help="q-expansion length")
    figure_args(p)

    p = sub.add_parser("selftest", help="run the acceptance criteria")
    p.add_argument("--out", type=Path, help="write the JSON summary here")
    return parser


def parse_config(argv: list[str] | None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    values = vars(ns)
    cfg = RunConfig(
        command=ns.command,
        kernel=values.get("kernel", "gaussian"),
        L=values.get("L", 2.0),
        x=values.get("x", 2000.0),
        A=values.get("A", 25),
        B=values.get("B", 25),
        r_max=values.get("r_max", 4),
        threads=values.get("threads", 1),
        cache_path=values.get("cache"),
        out_path=values.get("out"),
        histogram=values.get("histogram", False),
        figure_path=values.get("figure"),
        no_figure=values.get("no_figure", False),
        k=values.get("k", 12),
        n_max=values.get("nmax", 10_000),
    )
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = HANDLERS[cfg.command](cfg)
        emit(cfg, report)
        return EXIT_OK
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantError as exc:
        if exc.report is not None:
            try:
                emit(cfg, exc.report)
            except OSError:
                pass
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except es.DegenerateVarianceError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
