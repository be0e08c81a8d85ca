"""Demand profiles: the scalar field over the plane that encodes where and
how strongly agents are needed. Zero outside the region of interest.

Four kinds are provided:

* :class:`SignalSumProfile` - a baseline plus weighted radial signals at
  demand centers (the signal-coverage setting; supports per-center signals).
* :class:`LinearFieldProfile` - a*x + b*y inside the region.
* :class:`ExponentialFieldProfile` - c * exp(-lam * |p - center|^2).
* :class:`ElectrostaticProfile` - sum of -n_k / r potentials with a sensing
  cutoff, for charge-style target assignment.

``gradient`` returns the per-kind ascent direction used by the dynamics.
For the first three kinds this is the calculus gradient of the interior
expression. For the electrostatic kind the returned vector points toward
the centers with magnitude n_k / r^2 (the attraction orientation the
charge dynamics require); finite differences of ``value`` give its negation.
At or outside the region boundary, gradients are zero with a flag: the
discontinuity there is handled by the stay-put rule, not by one-sided
derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .geometry import COINCIDENT_EPS, Region
from .kernels import SignalFunction

ELECTROSTATIC_R_MIN = 1e-6


def _as_points(points) -> tuple[np.ndarray, bool]:
    p = np.asarray(points, dtype=float)
    single = p.ndim == 1
    return (p[None, :] if single else p), single


@dataclass(frozen=True)
class _ProfileBase:
    region: Region
    baseline: float

    def in_support(self, points):
        """True inside the closed region (where the profile may be nonzero)."""
        return self.region.contains(points)

    def interior(self, points):
        p = np.asarray(points, dtype=float)
        x, y = p[..., 0], p[..., 1]
        r = self.region
        return (x > r.xmin) & (x < r.xmax) & (y > r.ymin) & (y < r.ymax)

    def value(self, points):
        p, single = _as_points(points)
        out = np.where(self.in_support(p), self.baseline + self._interior_value(p), 0.0)
        return float(out[0]) if single else out

    def gradient(self, p):
        """(vector, interior) at a single point; zero vector when the point
        is on or outside the boundary."""
        g, inside = self.gradient_batch(np.asarray(p, dtype=float)[None, :])
        return g[0], bool(inside[0])

    def gradient_batch(self, points):
        p = np.asarray(points, dtype=float)
        inside = self.interior(p)
        g = self._interior_gradient(p)
        g[~inside] = 0.0
        return g, inside


@dataclass(frozen=True)
class SignalSumProfile(_ProfileBase):
    """baseline + sum of demands[k] * signals[k](|p - centers[k]|)."""

    centers: np.ndarray
    signals: tuple[SignalFunction, ...]
    demands: np.ndarray
    active: np.ndarray

    @staticmethod
    def create(region: Region, centers, signals, demands,
               baseline: float = 1.0) -> "SignalSumProfile":
        centers = np.atleast_2d(np.asarray(centers, dtype=float))
        demands = np.asarray(demands, dtype=float)
        if isinstance(signals, SignalFunction):
            signals = (signals,) * len(centers)
        if len(signals) != len(centers) or len(demands) != len(centers):
            raise ValueError("centers, signals and demands must align")
        if np.any(demands < 1):
            raise ValueError("per-center demand must be at least 1")
        return SignalSumProfile(region, float(baseline), centers,
                                tuple(signals), demands,
                                np.ones(len(centers), dtype=bool))

    def with_active(self, active) -> "SignalSumProfile":
        return replace(self, active=np.asarray(active, dtype=bool).copy())

    def _interior_value(self, p):
        total = np.zeros(p.shape[:-1])
        for k in range(len(self.centers)):
            if not self.active[k]:
                continue
            r = np.hypot(p[..., 0] - self.centers[k, 0], p[..., 1] - self.centers[k, 1])
            total += self.demands[k] * self.signals[k].value(r)
        return total

    def _interior_gradient(self, p):
        g = np.zeros_like(p)
        for k in range(len(self.centers)):
            if not self.active[k]:
                continue
            d = p - self.centers[k]
            r = np.hypot(d[..., 0], d[..., 1])
            safe = np.maximum(r, COINCIDENT_EPS)
            w = self.demands[k] * self.signals[k].slope(r) / safe
            w = np.where(r > COINCIDENT_EPS, w, 0.0)
            g += d * w[..., None]
        return g


@dataclass(frozen=True)
class LinearFieldProfile(_ProfileBase):
    """a*x + b*y inside the region (baseline usually 0)."""

    a: float
    b: float

    @staticmethod
    def create(region: Region, a: float, b: float,
               baseline: float = 0.0) -> "LinearFieldProfile":
        return LinearFieldProfile(region, float(baseline), float(a), float(b))

    def _interior_value(self, p):
        return self.a * p[..., 0] + self.b * p[..., 1]

    def _interior_gradient(self, p):
        g = np.empty_like(p)
        g[..., 0] = self.a
        g[..., 1] = self.b
        return g


@dataclass(frozen=True)
class ExponentialFieldProfile(_ProfileBase):
    """c * exp(-lam * |p - center|^2) inside the region."""

    c: float
    lam: float
    center: np.ndarray

    @staticmethod
    def create(region: Region, c: float, lam: float, center,
               baseline: float = 0.0) -> "ExponentialFieldProfile":
        if not (lam > 0):
            raise ValueError("field rate must be positive")
        return ExponentialFieldProfile(region, float(baseline), float(c),
                                       float(lam), np.asarray(center, dtype=float))

    def _interior_value(self, p):
        d = p - self.center
        return self.c * np.exp(-self.lam * (d[..., 0] ** 2 + d[..., 1] ** 2))

    def _interior_gradient(self, p):
        d = p - self.center
        w = -2.0 * self.c * self.lam * np.exp(-self.lam * (d[..., 0] ** 2 + d[..., 1] ** 2))
        return d * w[..., None]


@dataclass(frozen=True)
class ElectrostaticProfile(_ProfileBase):
    """Sum of demands[k] * (-1 / r) potentials, each cut off beyond the
    sensing range. Distances are clamped below at ELECTROSTATIC_R_MIN."""

    centers: np.ndarray
    demands: np.ndarray
    sensing_range: float
    active: np.ndarray

    @staticmethod
    def create(region: Region, centers, demands, sensing_range: float,
               baseline: float = 0.0) -> "ElectrostaticProfile":
        centers = np.atleast_2d(np.asarray(centers, dtype=float))
        demands = np.asarray(demands, dtype=float)
        if len(demands) != len(centers):
            raise ValueError("centers and demands must align")
        if np.any(demands < 1):
            raise ValueError("per-center demand must be at least 1")
        if not (sensing_range > 0):
            raise ValueError("sensing_range must be positive")
        return ElectrostaticProfile(region, float(baseline), centers, demands,
                                    float(sensing_range),
                                    np.ones(len(centers), dtype=bool))

    def with_active(self, active) -> "ElectrostaticProfile":
        return replace(self, active=np.asarray(active, dtype=bool).copy())

    def _interior_value(self, p):
        total = np.zeros(p.shape[:-1])
        for k in range(len(self.centers)):
            if not self.active[k]:
                continue
            r = np.hypot(p[..., 0] - self.centers[k, 0], p[..., 1] - self.centers[k, 1])
            term = -self.demands[k] / np.maximum(r, ELECTROSTATIC_R_MIN)
            total += np.where(r <= self.sensing_range, term, 0.0)
        return total

    def _interior_gradient(self, p):
        # Attraction orientation: toward each center within sensing range,
        # magnitude demand / r^2 (see module docstring).
        g = np.zeros_like(p)
        for k in range(len(self.centers)):
            if not self.active[k]:
                continue
            d = self.centers[k] - p
            r = np.hypot(d[..., 0], d[..., 1])
            w = self.demands[k] / (np.maximum(r, ELECTROSTATIC_R_MIN) ** 2
                                   * np.maximum(r, COINCIDENT_EPS))
            w = np.where((r > COINCIDENT_EPS) & (r <= self.sensing_range), w, 0.0)
            g += d * w[..., None]
        return g


def phi_value(profile, p):
    """Spec-level alias: profile value at a point."""
    return profile.value(p)


def phi_gradient(profile, p):
    """Spec-level alias: (gradient, interior flag) at a point."""
    return profile.gradient(p)


def in_support(profile, p):
    """Spec-level alias: closed-region membership."""
    result = profile.in_support(np.asarray(p, dtype=float))
    return bool(result) if np.isscalar(result) or result.ndim == 0 else result
