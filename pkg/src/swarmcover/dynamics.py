"""Force laws and the descent step.

All three laws produce, per agent, a velocity vector v built from what the
agent senses within its range: repulsive unit vectors from neighbors plus
attractive unit vectors toward demand, each scaled by a distance-dependent
magnitude. The position update is the normalized step

    p' = p - delta * v / |v| + noise        (p + noise when v = 0)

followed by the stay-put rule: a candidate landing outside the demand
profile's support cancels the whole move. The noise term is drawn uniformly
from the disk of radius (max_step - delta) and applies to every agent when
enabled; it breaks deadlocks (coincident or isolated agents) and keeps
agents exploring.

Velocities are computed from an immutable snapshot of all positions, so
evaluation order never matters (synchronous update). Pairs closer than
COINCIDENT_EPS have no defined direction and contribute nothing; the noise
term separates them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import COINCIDENT_EPS
from .kernels import KernelTable
from .profiles import ELECTROSTATIC_R_MIN
from .rng import RngStream

SIGNAL_COVERAGE = "signal_coverage"
ELECTROSTATIC = "electrostatic"
SCALAR_FIELD = "scalar_field"
LAWS = (SIGNAL_COVERAGE, ELECTROSTATIC, SCALAR_FIELD)


@dataclass(frozen=True)
class DynamicsConfig:
    law: str
    sensing_range: float
    delta: float            # deterministic step length
    max_step: float         # per-step motion bound (>= delta)
    noise_enabled: bool = True
    kernel: KernelTable | None = None                    # agent-agent, signal law
    target_kernels: tuple[KernelTable, ...] = ()         # per-target, signal law

    def __post_init__(self):
        if self.law not in LAWS:
            raise ValueError(f"unknown dynamics law {self.law!r}")
        if not (self.sensing_range > 0):
            raise ValueError("sensing_range must be positive")
        if not (0 < self.delta <= self.max_step):
            raise ValueError("step lengths must satisfy 0 < delta <= max_step")
        if self.law == SIGNAL_COVERAGE and self.kernel is None:
            raise ValueError("signal-coverage dynamics need an agent kernel")

    @property
    def noise_radius(self) -> float:
        return self.max_step - self.delta


@dataclass(frozen=True)
class ForceReport:
    """Raw velocity for one agent plus an isolation flag (zero velocity and
    nothing sensed within range)."""

    v: np.ndarray
    is_isolated: bool


def _pair_geometry(positions: np.ndarray, sensing_range: float, rows=None):
    """Pairwise offsets/distances with the closed-ball sensing mask.

    diff[i, j] = p_j - p_i for agent i in the ``rows`` block (all agents when
    None) against every agent j; the mask excludes self-pairs and coincident
    pairs.
    """
    p = np.asarray(positions, dtype=float)
    q = p if rows is None else p[rows]
    diff = p[None, :, :] - q[:, None, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    mask = (dist <= sensing_range) & (dist > COINCIDENT_EPS)
    return diff, dist, mask


def _target_geometry(positions: np.ndarray, centers: np.ndarray,
                     sensing_range: float, rows=None):
    """Offsets/distances from each agent in the block to each center."""
    p = np.asarray(positions, dtype=float)
    q = p if rows is None else p[rows]
    diff = centers[None, :, :] - q[:, None, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    mask = (dist <= sensing_range) & (dist > COINCIDENT_EPS)
    return diff, dist, mask


def signal_coverage_velocities(positions, centers, active, kernel: KernelTable,
                               target_kernels, sensing_range: float, rows=None):
    """Velocities under signal-coverage dynamics.

    v_i = sum_j F(|p_i - p_j|) e_{i->j} - sum_k F_k(|p_i - c_k|) e_{i->k},
    both sums over the sensing ball. Returns (velocities, sensed_any) for
    the ``rows`` block (all agents when None).
    """
    diff, dist, mask = _pair_geometry(positions, sensing_range, rows)
    safe = np.maximum(dist, COINCIDENT_EPS)
    w = np.where(mask, kernel(dist) / safe, 0.0)
    v = np.einsum("ijk,ij->ik", diff, w)
    sensed = mask.any(axis=1)

    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if centers.size:
        tdiff, tdist, tmask = _target_geometry(positions, centers,
                                               sensing_range, rows)
        tmask &= np.asarray(active, dtype=bool)[None, :]
        for k, fk in enumerate(target_kernels):
            col = tmask[:, k]
            if not col.any():
                continue
            wk = np.zeros(len(v))
            wk[col] = fk(tdist[col, k]) / tdist[col, k]
            v -= tdiff[:, k, :] * wk[:, None]
        sensed |= tmask.any(axis=1)
    return v, sensed


def electrostatic_velocities(positions, centers, demands, active,
                             sensing_range: float, rows=None):
    """Charge-style velocities: v_i = sum_j e_{i->j} / r^2
    - sum_k n_k e_{i->k} / r^2, distances clamped below at the global
    minimum to bound the singular magnitudes."""
    diff, dist, mask = _pair_geometry(positions, sensing_range, rows)
    clamped = np.maximum(dist, ELECTROSTATIC_R_MIN)
    safe = np.maximum(dist, COINCIDENT_EPS)
    w = np.where(mask, 1.0 / (clamped * clamped * safe), 0.0)
    v = np.einsum("ijk,ij->ik", diff, w)
    sensed = mask.any(axis=1)

    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if centers.size:
        tdiff, tdist, tmask = _target_geometry(positions, centers,
                                               sensing_range, rows)
        tmask &= np.asarray(active, dtype=bool)[None, :]
        tclamped = np.maximum(tdist, ELECTROSTATIC_R_MIN)
        tw = np.where(tmask,
                      np.asarray(demands, dtype=float)[None, :]
                      / (tclamped * tclamped * np.maximum(tdist, COINCIDENT_EPS)),
                      0.0)
        v -= np.einsum("ijk,ij->ik", tdiff, tw)
        sensed |= tmask.any(axis=1)
    return v, sensed


def scalar_field_velocities(positions, profile, sensing_range: float, rows=None):
    """Field-coverage velocities: v_i = sum_j e_{i->j} / r^2 - grad(profile)
    at p_i. The gradient is zero (flag folded in) on or outside the region
    boundary."""
    diff, dist, mask = _pair_geometry(positions, sensing_range, rows)
    clamped = np.maximum(dist, ELECTROSTATIC_R_MIN)
    safe = np.maximum(dist, COINCIDENT_EPS)
    w = np.where(mask, 1.0 / (clamped * clamped * safe), 0.0)
    v = np.einsum("ijk,ij->ik", diff, w)
    p = np.asarray(positions, dtype=float)
    grads, _ = profile.gradient_batch(p if rows is None else p[rows])
    v -= grads
    return v, mask.any(axis=1)


def _report(velocities: np.ndarray, sensed: np.ndarray) -> ForceReport:
    v = velocities[0]
    return ForceReport(v=v.copy(), is_isolated=bool(not sensed[0] and not np.any(v)))


def signal_coverage_velocity(i, positions, centers, active, kernel,
                             target_kernels, sensing_range) -> ForceReport:
    """Single-agent view of :func:`signal_coverage_velocities`."""
    v, sensed = signal_coverage_velocities(positions, centers, active, kernel,
                                           target_kernels, sensing_range,
                                           rows=slice(i, i + 1))
    return _report(v, sensed)


def electrostatic_velocity(i, positions, centers, demands, active,
                           sensing_range) -> ForceReport:
    """Single-agent view of :func:`electrostatic_velocities`."""
    v, sensed = electrostatic_velocities(positions, centers, demands, active,
                                         sensing_range, rows=slice(i, i + 1))
    return _report(v, sensed)


def scalar_field_velocity(i, positions, profile, sensing_range) -> ForceReport:
    """Single-agent view of :func:`scalar_field_velocities`."""
    v, sensed = scalar_field_velocities(positions, profile, sensing_range,
                                        rows=slice(i, i + 1))
    return _report(v, sensed)


def apply_steps(positions, velocities, cfg: DynamicsConfig, profile,
                noise) -> np.ndarray:
    """Normalized descent step plus noise for every agent, with the
    stay-put rule applied to each candidate position."""
    p = np.asarray(positions, dtype=float)
    v = np.asarray(velocities, dtype=float)
    norms = np.linalg.norm(v, axis=-1)
    moving = norms > 0.0
    cand = p.copy()
    cand[moving] -= cfg.delta * v[moving] / norms[moving, None]
    if noise is not None:
        cand = cand + noise
    inside = profile.in_support(cand)
    return np.where(inside[:, None], cand, p)


def apply_step(p, report: ForceReport, cfg: DynamicsConfig, profile,
               rng: RngStream | None = None, agent_id: int = 0,
               step: int = 0) -> np.ndarray:
    """Single-agent step: candidate = p - delta * v/|v| + noise (or p + noise
    when v = 0); the move is cancelled entirely if the candidate leaves the
    profile's support."""
    if cfg.noise_enabled and rng is not None and cfg.noise_radius > 0:
        noise = rng.disk(agent_id, step, cfg.noise_radius)[None, :]
    else:
        noise = None
    out = apply_steps(np.asarray(p, dtype=float)[None, :],
                      report.v[None, :], cfg, profile, noise)
    return out[0]
