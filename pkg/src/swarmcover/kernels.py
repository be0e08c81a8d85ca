"""Radial signal functions and their interaction kernels.

Each agent emits a radially symmetric signal f(r). The magnitude of the
attraction/repulsion force between two signal sources at distance r is a
1D function F(r) obtained by integrating the product of one signal with the
radial slope of the other over the plane:

    F(r) = -iint f(sqrt((x - r)^2 + y^2)) * f'(sqrt(x^2 + y^2)) * x / sqrt(x^2 + y^2) dx dy

With this orientation F >= 0 for decreasing signals, and for the pure
Gaussian f(r) = exp(-L r^2) it has the closed form (pi/2) r exp(-L r^2 / 2).
F vanishes identically beyond twice the signal cutoff, so it is cheap to
tabulate once and interpolate.

The overall factor 2 that the squared-error gradient carries is *not*
stored in kernel tables: the descent step is normalized to unit length, so
any positive global scale of the velocity leaves trajectories unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class SignalFunction:
    """Radial signal f(r): nonnegative on [0, cutoff], exactly 0 beyond.

    ``shape`` is "gaussian" (f(r) = exp(-lam * r^2)) or "tabulated"
    (linear interpolation of (r, value) samples). ``cutoff`` may be inf.
    """

    shape: str
    cutoff: float
    lam: float | None = None
    samples_r: np.ndarray | None = None
    samples_v: np.ndarray | None = None

    @staticmethod
    def gaussian(lam: float, cutoff: float = math.inf) -> "SignalFunction":
        if not (lam > 0):
            raise ValueError("gaussian rate must be positive")
        if cutoff < 0:
            raise ValueError("cutoff must be nonnegative")
        return SignalFunction("gaussian", float(cutoff), lam=float(lam))

    @staticmethod
    def tabulated(radii, values) -> "SignalFunction":
        r = np.asarray(radii, dtype=float)
        v = np.asarray(values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size < 2:
            raise ValueError("need matching 1D sample arrays with >= 2 points")
        if r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise ValueError("sample radii must increase from 0")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("sample values must be finite and nonnegative")
        return SignalFunction("tabulated", float(r[-1]),
                              samples_r=r, samples_v=v)

    def value(self, r):
        """f(r), vectorized; raises for negative radii."""
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("radius must be nonnegative")
        if self.shape == "gaussian":
            out = np.exp(-self.lam * r * r)
        else:
            out = np.interp(r, self.samples_r, self.samples_v, right=0.0)
        return np.where(r <= self.cutoff, out, 0.0)

    def slope(self, r):
        """df/dr inside the support, 0 beyond the cutoff.

        Tabulated signals use central differences of the samples.
        """
        r = np.asarray(r, dtype=float)
        if self.shape == "gaussian":
            out = -2.0 * self.lam * r * np.exp(-self.lam * r * r)
        else:
            dv = np.gradient(self.samples_v, self.samples_r)
            out = np.interp(r, self.samples_r, dv, right=0.0)
        return np.where(r <= self.cutoff, out, 0.0)

    def effective_radius(self, tol: float = 1e-12) -> float:
        """Radius beyond which f is below ``tol`` of its peak (== cutoff for
        compact-support signals). Used to bound metric grids for signals
        with infinite cutoff."""
        if math.isfinite(self.cutoff):
            return self.cutoff
        if self.shape == "gaussian":
            return math.sqrt(math.log(1.0 / tol) / self.lam)
        return float(self.samples_r[-1])


def gaussian_kernel_closed_form(r, lam: float):
    """(pi/2) r exp(-lam r^2 / 2): the kernel of the pure (uncut) Gaussian."""
    if not (lam > 0):
        raise ValueError("gaussian rate must be positive")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be nonnegative")
    return 0.5 * np.pi * r * np.exp(-0.5 * lam * r * r)


@dataclass(frozen=True)
class KernelTable:
    """Uniformly sampled F(r) with linear interpolation.

    Lookups return ``tail`` (0 for force kernels) beyond ``r_max`` and are
    scaled by ``demand_scale``, the per-target demand multiplier applied at
    the use site. Immutable after construction.
    """

    nodes: np.ndarray
    values: np.ndarray
    r_max: float
    demand_scale: float = 1.0
    tail: float = 0.0

    def __post_init__(self):
        if self.nodes[0] != 0.0:
            raise ValueError("kernel nodes must start at r = 0")
        if self.nodes.shape != self.values.shape:
            raise ValueError("nodes and values must match")

    def __call__(self, r):
        """F(r) (times demand_scale), vectorized."""
        r = np.asarray(r, dtype=float)
        out = np.interp(r, self.nodes, self.values, right=self.tail)
        return self.demand_scale * out

    def scaled(self, factor: float) -> "KernelTable":
        return replace(self, demand_scale=self.demand_scale * float(factor))

    def hard_truncated(self, radius: float) -> "KernelTable":
        """Crude cutoff: drop the table beyond ``radius`` (at the last node
        not exceeding it), so lookups return 0 there. Useful for
        infinite-support signals whose kernel is already tiny at the
        sensing range."""
        keep = self.nodes <= radius
        if not keep.any():
            raise ValueError("truncation radius is below the first node")
        return replace(self, nodes=self.nodes[keep], values=self.values[keep],
                       r_max=float(self.nodes[keep][-1]), tail=0.0)

    def cumulative(self) -> "KernelTable":
        """H(r) = integral of F from 0 to r (trapezoid); constant beyond
        the support. Used by the discrete pairwise error functional."""
        dr = np.diff(self.nodes)
        h = np.concatenate([[0.0], np.cumsum(0.5 * (self.values[1:] + self.values[:-1]) * dr)])
        h = self.demand_scale * h
        return KernelTable(self.nodes, h, self.r_max, demand_scale=1.0,
                           tail=float(h[-1]))

    def save(self, path) -> None:
        """Write the cache file: ``kernel v1 <r_max> <node_count>`` header,
        then one ``r,value`` line per node (values include demand_scale)."""
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"kernel v1 {self.r_max!r} {len(self.nodes)}\n")
            for r, v in zip(self.nodes, self.values):
                fh.write(f"{float(r)!r},{float(self.demand_scale * v)!r}\n")

    @staticmethod
    def load(path) -> "KernelTable":
        with open(path, "r", encoding="ascii") as fh:
            header = fh.readline().split()
            if len(header) != 4 or header[0] != "kernel" or header[1] != "v1":
                raise ConfigError(f"not a kernel cache file: {path}")
            r_max = float(header[2])
            count = int(header[3])
            rows = [line.strip().split(",") for line in fh if line.strip()]
        if len(rows) != count:
            raise ConfigError(
                f"kernel cache {path} declares {count} nodes, found {len(rows)}")
        nodes = np.array([float(r) for r, _ in rows])
        values = np.array([float(v) for _, v in rows])
        return KernelTable(nodes, values, r_max)


def derive_kernel(f: SignalFunction, grid_step: float | None = None,
                  quad_resolution: int = 512,
                  truncation_radius: float | None = None) -> KernelTable:
    """Tabulate F(r) for signal ``f`` by 2D midpoint quadrature.

    The table spans [0, r_max] with r_max = 2 * cutoff for compact-support
    signals (F vanishes identically beyond that: the two signal supports are
    disjoint). Signals with infinite cutoff need ``truncation_radius``, which
    bounds both the table and the integration box; pick it where f is
    negligible. ``grid_step`` defaults to r_max / 512.
    """
    if quad_resolution < 64:
        raise ValueError("quad_resolution must be at least 64")
    if math.isfinite(f.cutoff):
        half_width = f.cutoff
        r_max = 2.0 * f.cutoff
    else:
        if truncation_radius is None or not math.isfinite(truncation_radius):
            raise ConfigError(
                "signal has infinite cutoff: a finite truncation_radius is "
                "required to bound the kernel integral")
        half_width = float(truncation_radius)
        r_max = float(truncation_radius)
    if grid_step is None:
        grid_step = r_max / 512.0
    if not (grid_step > 0):
        raise ValueError("grid_step must be positive")

    n_nodes = int(math.floor(r_max / grid_step + 0.5)) + 1
    nodes = np.arange(n_nodes) * grid_step

    # Midpoint grid over the integration box [-w, w]^2. The slope factor has
    # support inside radius w, so the box always contains the integrand's
    # support; midpoints never hit rho = 0.
    n = int(quad_resolution)
    h = 2.0 * half_width / n
    axis = -half_width + (np.arange(n) + 0.5) * h
    X, Y = np.meshgrid(axis, axis)
    rho = np.hypot(X, Y)
    weight = f.slope(rho) * (X / rho)

    values = np.zeros(n_nodes)
    cell = h * h
    for j in range(1, n_nodes):
        r = nodes[j]
        shifted = np.hypot(X - r, Y)
        values[j] = -cell * float(np.sum(f.value(shifted) * weight))
    # values[0] stays exactly 0: the integrand is odd in x at r = 0.
    # Entries twelve orders below the peak are quadrature roundoff, not
    # signal; flush them so far-field forces are exactly zero rather than
    # noise (a nonzero ghost force would still drive a full normalized step).
    peak = float(np.max(np.abs(values)))
    if peak > 0.0:
        values[np.abs(values) < 1e-12 * peak] = 0.0
    return KernelTable(nodes, values, float(nodes[-1]))


def kernel_lookup(table: KernelTable, r) -> np.ndarray:
    """Module-level alias for calling the table."""
    return table(r)
