"""The synchronous discrete-time simulation loop.

Each step: snapshot positions, evaluate every agent's velocity from the
snapshot, apply the normalized step + noise + stay-put rule to all agents
at once, then (when enabled) retire targets whose demand is met by the new
positions. Agents carry no state between steps except their position, so a
serialized world resumes bit-identically.

Worker fan-out: force evaluation may be split across threads (the
``SWARM_THREADS`` environment variable caps the count, 0 = auto). Each
worker fills a disjoint row block from the same immutable snapshot, so the
result is identical for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, TextIO

import numpy as np

from .dynamics import (DynamicsConfig, ELECTROSTATIC, SCALAR_FIELD,
                       SIGNAL_COVERAGE, apply_steps,
                       electrostatic_velocities, scalar_field_velocities,
                       signal_coverage_velocities)
from .errors import ConfigError
from .geometry import Region, SpatialIndex
from .kernels import SignalFunction
from .metrics import (MetricsGrid, ar_total_error,
                      electrostatic_pair_potential, psi_field, total_error)
from .rng import RngStream


def worker_count() -> int:
    """Worker cap from SWARM_THREADS (0 or unset = auto, currently 1)."""
    raw = os.environ.get("SWARM_THREADS", "0").strip()
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"SWARM_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise ConfigError("SWARM_THREADS must be nonnegative")
    return n if n > 0 else 1


@dataclass
class Target:
    id: int
    position: np.ndarray
    demand: int
    active: bool = True
    completed_step: int | None = None


@dataclass(frozen=True)
class Event:
    step: int
    kind: str
    target_id: int
    count: int


@dataclass
class RunSinks:
    """Optional output streams for a run. CSV headers are written lazily."""

    trajectory: TextIO | None = None
    metrics: TextIO | None = None
    events: TextIO | None = None
    frame_writer: Callable[["World", int], None] | None = None
    frames_every: int = 0
    _started: set = field(default_factory=set)

    def _write(self, handle: TextIO, name: str, header: str, lines, step: int):
        try:
            if name not in self._started:
                handle.write(header + "\n")
                self._started.add(name)
            for line in lines:
                handle.write(line + "\n")
        except OSError as exc:
            raise RuntimeError(f"{name} sink write failed at step {step}: {exc}") from exc

    def emit_positions(self, step: int, ids, positions):
        if self.trajectory is None:
            return
        lines = [f"{step},{int(i)},{float(p[0])!r},{float(p[1])!r}"
                 for i, p in zip(ids, positions)]
        self._write(self.trajectory, "trajectory", "step,agent_id,x,y", lines, step)

    def emit_error(self, step: int, value: float):
        if self.metrics is None:
            return
        self._write(self.metrics, "metrics", "step,G",
                    [f"{step},{float(value)!r}"], step)

    def emit_events(self, events):
        if self.events is None or not events:
            return
        lines = [f"{e.step},{e.target_id},{e.kind},{e.count}" for e in events]
        self._write(self.events, "events", "step,target_id,kind,count",
                    lines, events[0].step)

    def emit_frame(self, world: "World", step: int):
        if self.frame_writer is not None:
            self.frame_writer(world, step)


class World:
    """Full simulation state: agent positions, targets, dynamics, telemetry.

    Construct directly or through :func:`swarmcover.scenario.build_world`.
    ``positions`` must lie inside ``region``; agent count is fixed at
    construction (agents may be removed, never added).
    """

    def __init__(self, region: Region, positions, targets, profile,
                 dynamics: DynamicsConfig, completion_radius: float,
                 targets_disappear: bool, seed: int,
                 signal: SignalFunction | None = None,
                 metrics_resolution: int = 512,
                 agent_ids=None, step: int = 0):
        self.region = region
        self.positions = np.atleast_2d(np.asarray(positions, dtype=float)).copy()
        if self.positions.size and not np.all(np.isfinite(self.positions)):
            raise ValueError("agent positions must be finite")
        if self.positions.size and not np.all(region.contains(self.positions)):
            raise ValueError("all agents must start inside the region")
        n = len(self.positions)
        self.agent_ids = (np.arange(n) if agent_ids is None
                          else np.asarray(agent_ids, dtype=int).copy())
        self.targets = list(targets)
        self.profile = profile
        self.dynamics = dynamics
        self.completion_radius = float(completion_radius)
        if not (0 < self.completion_radius <= dynamics.sensing_range):
            raise ValueError("completion radius must be in (0, sensing_range]")
        self.targets_disappear = bool(targets_disappear)
        self.seed = int(seed)
        self.signal = signal
        self.metrics_resolution = int(metrics_resolution)
        self.step = int(step)
        self.initial_slots = int(self.agent_ids.max()) + 1 if n else 0
        self.rng = RngStream(self.seed, self.initial_slots)
        self._grid: MetricsGrid | None = None

    # -- derived views -------------------------------------------------

    @property
    def n_agents(self) -> int:
        return len(self.positions)

    def _target_arrays(self):
        if not self.targets:
            empty = np.empty((0, 2))
            return empty, np.empty(0), np.zeros(0, dtype=bool)
        centers = np.array([t.position for t in self.targets], dtype=float)
        demands = np.array([t.demand for t in self.targets], dtype=float)
        active = np.array([t.active for t in self.targets], dtype=bool)
        return centers, demands, active

    @property
    def grid(self) -> MetricsGrid:
        if self._grid is None:
            pad = self.dynamics.sensing_range
            if self.signal is not None:
                pad = max(pad, self.signal.effective_radius())
            self._grid = MetricsGrid.covering(self.region, pad,
                                              self.metrics_resolution)
        return self._grid

    # -- forces and stepping -------------------------------------------

    def _velocities(self) -> np.ndarray:
        cfg = self.dynamics
        centers, demands, active = self._target_arrays()
        p = self.positions

        def block(rows):
            if cfg.law == SIGNAL_COVERAGE:
                return signal_coverage_velocities(
                    p, centers, active, cfg.kernel, cfg.target_kernels,
                    cfg.sensing_range, rows=rows)[0]
            if cfg.law == ELECTROSTATIC:
                return electrostatic_velocities(
                    p, centers, demands, active, cfg.sensing_range, rows=rows)[0]
            return scalar_field_velocities(p, self.profile, cfg.sensing_range,
                                           rows=rows)[0]

        workers = worker_count()
        n = self.n_agents
        if workers <= 1 or n < 2 * workers:
            return block(None)
        bounds = np.linspace(0, n, workers + 1).astype(int)
        v = np.empty_like(p)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [(slice(a, b), pool.submit(block, slice(a, b)))
                       for a, b in zip(bounds[:-1], bounds[1:]) if a < b]
            for rows, fut in futures:
                v[rows] = fut.result()
        return v

    def step_world(self) -> list[Event]:
        """Advance one step; returns any target-completion events."""
        cfg = self.dynamics
        v = self._velocities()
        noise = None
        if cfg.noise_enabled and cfg.noise_radius > 0 and self.n_agents:
            noise = self.rng.disk_noise(self.step, cfg.noise_radius)[self.agent_ids]
        self.positions = apply_steps(self.positions, v, cfg, self.profile, noise)
        self.step += 1
        if self.targets_disappear:
            return self.check_targets()
        return []

    def target_counts(self) -> list[int]:
        """Agents within the completion radius of each target (closed ball)."""
        if not self.targets:
            return []
        index = SpatialIndex.build(
            zip(self.agent_ids, self.positions), self.completion_radius)
        return [len(index.neighbors_within(t.position, self.completion_radius))
                for t in self.targets]

    def check_targets(self) -> list[Event]:
        """Retire every active target whose demand is met by the current
        positions; emits one event per newly retired target."""
        events = []
        counts = self.target_counts()
        changed = False
        for t, count in zip(self.targets, counts):
            if t.active and count >= t.demand:
                t.active = False
                t.completed_step = self.step
                changed = True
                events.append(Event(self.step, "target_completed", t.id, count))
        if changed and hasattr(self.profile, "with_active"):
            mask = [t.active for t in self.targets]
            self.profile = self.profile.with_active(mask)
        return events

    # -- telemetry ------------------------------------------------------

    def current_error(self) -> float:
        if self.dynamics.law == SIGNAL_COVERAGE:
            return total_error(self.profile, self.positions, self.signal, self.grid)
        H = electrostatic_pair_potential(self.dynamics.sensing_range)
        return ar_total_error(self.positions, self.profile, H)

    def psi(self) -> np.ndarray:
        """Squared-error field on the metrics grid (signal law only)."""
        if self.dynamics.law != SIGNAL_COVERAGE:
            raise ConfigError("the error field is defined for signal-coverage runs")
        return psi_field(self.profile, self.positions, self.signal, self.grid)

    # -- lifecycle -------------------------------------------------------

    def remove_agents(self, ids) -> None:
        """Drop the given agents (crash simulation). Remaining agents keep
        their identities and random streams."""
        drop = set(int(i) for i in ids)
        keep = np.array([i not in drop for i in self.agent_ids], dtype=bool)
        self.positions = self.positions[keep]
        self.agent_ids = self.agent_ids[keep]

    def state_dict(self) -> dict:
        """Everything that varies over a run; pair with the scenario to
        reconstruct the world exactly."""
        return {
            "format": "world-state v1",
            "step": self.step,
            "seed": self.seed,
            "agent_ids": [int(i) for i in self.agent_ids],
            "positions": [[float(x), float(y)] for x, y in self.positions],
            "targets": [{"id": t.id, "active": t.active,
                         "completed_step": t.completed_step}
                        for t in self.targets],
        }

    def apply_state(self, state: dict) -> None:
        if state.get("format") != "world-state v1":
            raise ConfigError("unrecognized world state format")
        self.step = int(state["step"])
        self.agent_ids = np.array(state["agent_ids"], dtype=int)
        self.positions = np.array(state["positions"], dtype=float).reshape(-1, 2)
        by_id = {t.id: t for t in self.targets}
        for entry in state["targets"]:
            t = by_id[int(entry["id"])]
            t.active = bool(entry["active"])
            t.completed_step = entry["completed_step"]
        if hasattr(self.profile, "with_active"):
            self.profile = self.profile.with_active(
                [t.active for t in self.targets])

    # -- driving ----------------------------------------------------------

    def run(self, steps: int, metrics_every: int = 0,
            sinks: RunSinks | None = None,
            stop_when_complete: bool = False) -> dict:
        """Advance ``steps`` steps, sampling telemetry every
        ``metrics_every`` steps (plus the initial and final states)."""
        if steps < 0:
            raise ValueError("steps must be nonnegative")
        sinks = sinks or RunSinks()

        def sample(step: int):
            if sinks.trajectory is not None:
                sinks.emit_positions(step, self.agent_ids, self.positions)
            if sinks.metrics is not None:
                sinks.emit_error(step, self.current_error())
            if sinks.frames_every and step % sinks.frames_every == 0:
                sinks.emit_frame(self, step)

        sample(self.step)
        all_events: list[Event] = []
        final = self.step + steps
        while self.step < final:
            events = self.step_world()
            if events:
                all_events.extend(events)
                sinks.emit_events(events)
            if (metrics_every and self.step % metrics_every == 0) or self.step == final:
                sample(self.step)
            elif sinks.frames_every and self.step % sinks.frames_every == 0:
                sinks.emit_frame(self, self.step)
            if stop_when_complete and self.targets and \
                    not any(t.active for t in self.targets):
                break

        counts = self.target_counts()
        satisfied = [c >= t.demand or not t.active
                     for t, c in zip(self.targets, counts)]
        return {
            "final_step": self.step,
            "final_error": self.current_error(),
            "events": len(all_events),
            "targets": [{
                "id": t.id,
                "demand": t.demand,
                "active": t.active,
                "count_within_radius": c,
                "completed_step": t.completed_step,
            } for t, c in zip(self.targets, counts)],
            "all_targets_satisfied": bool(all(satisfied)) if self.targets else True,
        }
