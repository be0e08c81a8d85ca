"""Planar geometry: vectors, the rectangular region of interest, and a
uniform-grid spatial index for radius-limited neighbor queries.

Positions are plain float arrays of shape (2,) for single points and (N, 2)
for collections. All sensing queries use closed-ball semantics (distance <= r)
so that a force cutoff at radius r and the query boundary coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Pairs closer than this are treated as coincident: the direction between
# them is undefined and they contribute no force.
COINCIDENT_EPS = 1e-12


def unit_toward(a, b, eps: float = COINCIDENT_EPS):
    """Unit vector from point ``a`` to point ``b``.

    Returns ``(direction, degenerate)``. If the points are within ``eps`` of
    each other the direction is the zero vector and ``degenerate`` is True;
    degeneracy is reported through the flag, never raised.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    n = math.hypot(float(d[0]), float(d[1]))
    if n <= eps:
        return np.zeros(2), True
    return d / n, False


@dataclass(frozen=True)
class Region:
    """Axis-aligned closed rectangle; the region of interest for a run."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        vals = (self.xmin, self.ymin, self.xmax, self.ymax)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("region corners must be finite")
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError("region must satisfy min < max on both axes")

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def center(self) -> np.ndarray:
        return np.array([0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax)])

    @property
    def area(self) -> float:
        return self.width * self.height

    def contains(self, points) -> np.ndarray:
        """Closed-region membership test; vectorized over trailing axis 2."""
        p = np.asarray(points, dtype=float)
        x, y = p[..., 0], p[..., 1]
        return (x >= self.xmin) & (x <= self.xmax) & (y >= self.ymin) & (y <= self.ymax)

    def padded(self, margin: float) -> "Region":
        return Region(self.xmin - margin, self.ymin - margin,
                      self.xmax + margin, self.ymax + margin)


class SpatialIndex:
    """Uniform-grid bucket index over identified 2D points.

    The cell size equals the largest query radius the index supports; any
    query with r <= cell_size only needs the 3x3 cell neighborhood of the
    query point. Built once, then read-only.
    """

    def __init__(self, cell_size: float):
        if not (cell_size > 0):
            raise ValueError("cell_size must be positive")
        self.cell_size = float(cell_size)
        self.buckets: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}
        self._count = 0

    @staticmethod
    def build(points, radius: float) -> "SpatialIndex":
        """Index ``points`` (iterable of (id, (x, y))) for queries up to ``radius``."""
        index = SpatialIndex(radius)
        cs = index.cell_size
        staging: dict[tuple[int, int], tuple[list, list]] = {}
        for pid, p in points:
            x, y = float(p[0]), float(p[1])
            key = (math.floor(x / cs), math.floor(y / cs))
            ids, pts = staging.setdefault(key, ([], []))
            ids.append(pid)
            pts.append((x, y))
            index._count += 1
        for key, (ids, pts) in staging.items():
            index.buckets[key] = (np.array(ids), np.array(pts, dtype=float))
        return index

    def __len__(self) -> int:
        return self._count

    def neighbors_within(self, p, r: float):
        """All indexed points within closed distance ``r`` of ``p``.

        Returns a list of (id, (x, y), distance) tuples. ``r`` may not exceed
        the cell size the index was built with.
        """
        if r > self.cell_size:
            raise ValueError(
                f"query radius {r} exceeds index cell size {self.cell_size}")
        if not self.buckets:
            return []
        x, y = float(p[0]), float(p[1])
        cs = self.cell_size
        cx, cy = math.floor(x / cs), math.floor(y / cs)
        out = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                bucket = self.buckets.get((cx + dx, cy + dy))
                if bucket is None:
                    continue
                ids, pts = bucket
                d = np.hypot(pts[:, 0] - x, pts[:, 1] - y)
                keep = d <= r
                for i in np.nonzero(keep)[0]:
                    out.append((int(ids[i]), (pts[i, 0], pts[i, 1]), float(d[i])))
        return out


def build_index(points, radius: float) -> SpatialIndex:
    """Module-level alias for :meth:`SpatialIndex.build`."""
    return SpatialIndex.build(points, radius)


def neighbors_within(index: SpatialIndex, p, r: float):
    """Module-level alias for :meth:`SpatialIndex.neighbors_within`."""
    return index.neighbors_within(p, r)
