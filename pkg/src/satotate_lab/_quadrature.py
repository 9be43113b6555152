"""Uniform-grid trapezoid rule on [0, 1] with node doubling."""

from __future__ import annotations

from typing import Callable

import numpy as np

START_NODES = 4096
MAX_NODES = 2**20
TOLERANCE = 1e-12


def trapezoid_unit(
    integrand: Callable[[np.ndarray], np.ndarray],
    start: int = START_NODES,
    tol: float = TOLERANCE,
    cap: int = MAX_NODES,
) -> float:
    """Integrate ``integrand`` over [0, 1], doubling the grid until two
    successive estimates differ by less than ``tol``.

    The integrands used in this package are either 1-periodic or even
    2-periodic functions of t, so the end-point-halved trapezoid rule on
    [0, 1] is spectrally accurate.
    """
    n = start
    previous = _trapezoid(integrand, n)
    while n < cap:
        n *= 2
        current = _trapezoid(integrand, n)
        if abs(current - previous) < tol:
            return current
        previous = current
    return previous


def _trapezoid(integrand: Callable[[np.ndarray], np.ndarray], n: int) -> float:
    t = np.linspace(0.0, 1.0, n + 1)
    values = np.asarray(integrand(t), dtype=float)
    return float((values.sum() - 0.5 * (values[0] + values[-1])) / n)
