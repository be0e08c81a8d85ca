"""Independent brute-force references used by the test suite and the
``validate-numerics`` CLI subcommand: central finite differences, plain
midpoint quadrature, and an O(N^2) neighbor scan.

These are deliberately simple and share no code with the paths they check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import Region


@dataclass(frozen=True)
class FdSpec:
    """Central-difference step for per-coordinate gradients."""

    h: float = 1e-4

    def __post_init__(self):
        if not (self.h > 0):
            raise ValueError("finite-difference step must be positive")


def finite_diff_gradient(evaluate: Callable[[np.ndarray], float],
                         q: np.ndarray, i: int,
                         spec: FdSpec = FdSpec()) -> np.ndarray:
    """Central-difference gradient of ``evaluate`` with respect to the
    coordinates of agent ``i`` in configuration ``q`` of shape (N, 2)."""
    q = np.asarray(q, dtype=float)
    h = spec.h
    grad = np.empty(2)
    for axis in range(2):
        qp = q.copy()
        qm = q.copy()
        qp[i, axis] += h
        qm[i, axis] -= h
        grad[axis] = (evaluate(qp) - evaluate(qm)) / (2.0 * h)
    return grad


def brute_force_quadrature(integrand: Callable[[np.ndarray, np.ndarray], np.ndarray],
                           box: Region, n: int) -> float:
    """Midpoint sum of ``integrand(x, y)`` on an n-by-n grid over ``box``.

    ``integrand`` must accept broadcast arrays and return an array.
    """
    if n < 2:
        raise ValueError("quadrature resolution must be at least 2")
    dx = box.width / n
    dy = box.height / n
    xs = box.xmin + (np.arange(n) + 0.5) * dx
    ys = box.ymin + (np.arange(n) + 0.5) * dy
    X, Y = np.meshgrid(xs, ys)
    return float(np.sum(integrand(X, Y)) * dx * dy)


def brute_force_neighbors(points, p, r: float):
    """All (id, (x, y), distance) within closed distance r, by direct scan."""
    x, y = float(p[0]), float(p[1])
    out = []
    for pid, q in points:
        d = float(np.hypot(q[0] - x, q[1] - y))
        if d <= r:
            out.append((int(pid), (float(q[0]), float(q[1])), d))
    return out
