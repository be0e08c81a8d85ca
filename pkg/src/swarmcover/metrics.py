"""Numerical evaluation of the coverage error.

The squared-error field Psi(x, y) = (Phi(x, y) - sum_i f(|p - p_i|))^2 is
sampled at the cell centers of a uniform grid covering the region of
interest padded by every signal's reach; its midpoint-rule integral is the
scalar total error reported by runs. Both are telemetry only: agents never
see them.

For the charge and field dynamics the discrete pairwise functional

    (1/2) sum_{i != j} H(|p_i - p_j|) - sum_i Phi(p_i)

serves the same role, with H a cumulative kernel or a cutoff potential.

All evaluations are pure functions of a position snapshot; cell sums use
numpy's pairwise summation, so results are reproducible bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .geometry import Region
from .kernels import SignalFunction
from .profiles import ELECTROSTATIC_R_MIN, SignalSumProfile


@dataclass(frozen=True, eq=False)
class MetricsGrid:
    """Uniform cell grid over ``bounds``; samples live at cell centers."""

    bounds: Region
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid resolution must be at least 2 per axis")

    @staticmethod
    def covering(region: Region, pad: float, resolution: int) -> "MetricsGrid":
        """Grid over ``region`` padded by ``pad`` on each side, ``resolution``
        cells along the longer axis (square cells)."""
        bounds = region.padded(pad)
        if bounds.width >= bounds.height:
            nx = int(resolution)
            ny = max(2, int(round(resolution * bounds.height / bounds.width)))
        else:
            ny = int(resolution)
            nx = max(2, int(round(resolution * bounds.width / bounds.height)))
        return MetricsGrid(bounds, nx, ny)

    @cached_property
    def xs(self) -> np.ndarray:
        dx = self.bounds.width / self.nx
        return self.bounds.xmin + (np.arange(self.nx) + 0.5) * dx

    @cached_property
    def ys(self) -> np.ndarray:
        dy = self.bounds.height / self.ny
        return self.bounds.ymin + (np.arange(self.ny) + 0.5) * dy

    @property
    def cell_area(self) -> float:
        return (self.bounds.width / self.nx) * (self.bounds.height / self.ny)

    def window(self, center, radius: float):
        """Index slices of the cells whose centers lie within ``radius`` of
        ``center`` along each axis (bounding box, not the disk)."""
        cx, cy = float(center[0]), float(center[1])
        i0 = int(np.searchsorted(self.xs, cx - radius, side="left"))
        i1 = int(np.searchsorted(self.xs, cx + radius, side="right"))
        j0 = int(np.searchsorted(self.ys, cy - radius, side="left"))
        j1 = int(np.searchsorted(self.ys, cy + radius, side="right"))
        return slice(j0, j1), slice(i0, i1)


def _add_radial(field: np.ndarray, grid: MetricsGrid, center,
                signal: SignalFunction, scale: float) -> None:
    """Accumulate scale * signal(|cell - center|) into ``field`` in place,
    touching only the cells inside the signal's reach."""
    reach = signal.effective_radius()
    rows, cols = grid.window(center, reach)
    if rows.start >= rows.stop or cols.start >= cols.stop:
        return
    X = grid.xs[cols][None, :] - float(center[0])
    Y = grid.ys[rows][:, None] - float(center[1])
    field[rows, cols] += scale * signal.value(np.hypot(X, Y))


def phi_on_grid(profile, grid: MetricsGrid) -> np.ndarray:
    """Demand profile sampled at cell centers (zero outside its region)."""
    if isinstance(profile, SignalSumProfile):
        field = np.zeros((grid.ny, grid.nx))
        for k in range(len(profile.centers)):
            if not profile.active[k]:
                continue
            _add_radial(field, grid, profile.centers[k], profile.signals[k],
                        float(profile.demands[k]))
        X, Y = np.meshgrid(grid.xs, grid.ys)
        inside = profile.region.contains(np.stack([X, Y], axis=-1))
        return np.where(inside, profile.baseline + field, 0.0)
    X, Y = np.meshgrid(grid.xs, grid.ys)
    return profile.value(np.stack([X, Y], axis=-1))


def agent_signal_on_grid(positions, signal: SignalFunction,
                         grid: MetricsGrid) -> np.ndarray:
    """Combined agent signal sampled at cell centers."""
    field = np.zeros((grid.ny, grid.nx))
    for p in np.atleast_2d(np.asarray(positions, dtype=float)):
        _add_radial(field, grid, p, signal, 1.0)
    return field


def psi_field(profile, positions, signal: SignalFunction,
              grid: MetricsGrid) -> np.ndarray:
    """Per-cell squared error between the demand profile and the agents'
    combined signal."""
    residual = phi_on_grid(profile, grid) - agent_signal_on_grid(positions, signal, grid)
    return residual * residual


def total_error(profile, positions, signal: SignalFunction,
                grid: MetricsGrid) -> float:
    """Midpoint-rule integral of the squared-error field."""
    return float(np.sum(psi_field(profile, positions, signal, grid)) * grid.cell_area)


def electrostatic_pair_potential(sensing_range: float):
    """H(r) = -1/r inside the sensing range, 0 beyond (r clamped below)."""
    def H(r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= sensing_range,
                        -1.0 / np.maximum(r, ELECTROSTATIC_R_MIN), 0.0)
    return H


def ar_total_error(positions, profile, H) -> float:
    """Discrete pairwise error: (1/2) sum_{i != j} H(r_ij) - sum_i Phi(p_i).

    ``H`` is any callable on distance arrays that already encodes its own
    cutoff behavior (a cumulative kernel table or a cutoff potential).
    """
    p = np.atleast_2d(np.asarray(positions, dtype=float))
    n = len(p)
    total = 0.0
    if n > 1:
        diff = p[None, :, :] - p[:, None, :]
        dist = np.sqrt(np.sum(diff * diff, axis=-1))
        hvals = np.asarray(H(dist), dtype=float)
        np.fill_diagonal(hvals, 0.0)
        total += 0.5 * float(np.sum(hvals))
    if n > 0:
        total -= float(np.sum(profile.value(p)))
    return total


def ar_gradient(positions, profile, h_slope) -> np.ndarray:
    """Calculus gradient of :func:`ar_total_error` with respect to every
    agent: sum_{j != i} h(r_ij) (p_i - p_j)/r_ij - grad Phi(p_i), with
    ``h_slope`` the derivative of H. Valid for differentiable-field profiles
    (linear, exponential, signal-sum) at interior points."""
    p = np.atleast_2d(np.asarray(positions, dtype=float))
    diff = p[:, None, :] - p[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    safe = np.maximum(dist, 1e-300)
    w = np.asarray(h_slope(dist), dtype=float) / safe
    np.fill_diagonal(w, 0.0)
    pair_term = np.einsum("ijk,ij->ik", diff, w)
    grads, _ = profile.gradient_batch(p)
    return pair_term - grads
