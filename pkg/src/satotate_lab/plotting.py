"""Figures written next to the JSON reports.

Uses the object-oriented Agg API (no pyplot state), so rendering is safe
from any thread and never needs a display.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .elliptic_stats import MomentReport
from .kernels import PeriodicWeight

FIGSIZE = (6.4, 4.0)


def _save(fig: Figure, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    FigureCanvasAgg(fig)
    fig.savefig(path, dpi=120, metadata={"Software": None})
    return path


def plot_error_histogram(report: MomentReport, path: str | Path) -> Path:
    """Density histogram of normalised errors over the standard normal density."""
    hist = report.histogram()
    edges = np.asarray(hist["binEdges"])
    counts = np.asarray(hist["counts"][1:-1], dtype=float)
    width = edges[1] - edges[0]
    density = counts / (report.family_count * width)

    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    ax.bar(edges[:-1], density, width=width, align="edge", color="0.75", edgecolor="0.4", lw=0.5,
           label=f"{report.family_count} curves")
    z = np.linspace(edges[0], edges[-1], 400)
    ax.plot(z, np.exp(-z * z / 2) / math.sqrt(2 * math.pi), "k-", lw=1.2, label="N(0, 1)")
    cfg = report.config
    ax.set_title(f"{cfg['kernel']} L={cfg['L']:g}  x={cfg['x']}  A={cfg['A']} B={cfg['B']}")
    ax.set_xlabel("normalised error")
    ax.set_ylabel("density")
    under, over = hist["counts"][0], hist["counts"][-1]
    if under or over:
        ax.text(0.02, 0.95, f"outside [-4, 4]: {under} / {over}", transform=ax.transAxes, va="top")
    ax.legend(frameon=False)
    fig.tight_layout()
    return _save(fig, path)


def plot_weight(weight: PeriodicWeight, path: str | Path) -> Path:
    """phi_L on one period beside its coefficients U(1..M)."""
    fig = Figure(figsize=(FIGSIZE[0] * 1.6, FIGSIZE[1]))
    left, right = fig.subplots(1, 2)
    t = np.linspace(0.0, 1.0, 801)
    left.plot(t, weight(t), "k-", lw=1.2)
    left.set_xlabel("t")
    left.set_ylabel(r"$\phi_L(t)$")
    left.set_title(f"{weight.kernel.name}, L = {weight.L:g}")
    m = np.arange(1, weight.M + 1)
    magnitudes = np.abs(weight.u_coeffs)
    right.stem(m, magnitudes, basefmt=" ")
    if np.any(magnitudes > 0):
        right.set_yscale("log")
    right.set_xlabel("m")
    right.set_ylabel("|U(m)|")
    right.set_title(f"M = {weight.M}, variance = {weight.variance:.6g}")
    fig.tight_layout()
    return _save(fig, path)


def plot_angles(thetas: np.ndarray, title: str, path: str | Path) -> Path:
    """Histogram of Frobenius angles against the Sato-Tate density 2 sin^2(pi t)."""
    fig = Figure(figsize=FIGSIZE)
    ax = fig.add_subplot()
    ax.hist(thetas, bins=24, range=(0.0, 1.0), density=True, color="0.75", edgecolor="0.4", lw=0.5)
    t = np.linspace(0.0, 1.0, 400)
    ax.plot(t, 2 * np.sin(np.pi * t) ** 2, "k-", lw=1.2, label="Sato-Tate")
    ax.set_xlabel(r"$\theta$")
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    return _save(fig, path)
