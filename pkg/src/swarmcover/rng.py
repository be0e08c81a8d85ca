"""Deterministic random streams for simulation runs.

Every draw is keyed by (seed, step, agent slot) through a counter-based
generator (Philox), so the value an agent receives at a given step is a pure
function of that key: it does not depend on evaluation order, on how many
other agents are still alive, or on how work is split across workers.
Re-running or resuming a simulation from any step reproduces the same draws.
"""

from __future__ import annotations

import numpy as np

# Salt separating the per-step noise streams from derived label streams.
_STEP_SALT = np.uint64(0x9E3779B97F4A7C15)

_FNV_OFFSET = np.uint64(0xCBF29CE484222325)
_FNV_PRIME = np.uint64(0x100000001B3)


def _fnv64(label: str) -> np.uint64:
    h = _FNV_OFFSET
    with np.errstate(over="ignore"):
        for byte in label.encode("utf-8"):
            h = np.uint64(h ^ np.uint64(byte)) * _FNV_PRIME
    return h


def derived_generator(seed: int, label: str) -> np.random.Generator:
    """A reproducible generator for one-off sampling (initial placement,
    scenario-level randomness), independent of the per-step noise streams."""
    key = np.array([np.uint64(seed), _fnv64(label)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class RngStream:
    """Per-(agent, step) random streams for a fixed number of agent slots.

    ``slots`` is the number of agents at the start of the run; agents keep
    their slot for life, so deleting some mid-run leaves the survivors'
    draws unchanged.

    Draws are produced in fixed blocks of ``_BLOCK`` consecutive steps from
    one counter-based generator keyed by (seed, block index); a step's
    uniforms are a fixed row of its block, hence still a pure function of
    (seed, step, slot). The block is only a cache: any access order yields
    the same values.
    """

    _BLOCK = 256

    def __init__(self, seed: int, slots: int):
        if slots < 0:
            raise ValueError("slots must be nonnegative")
        self.seed = int(seed)
        self.slots = int(slots)
        self._cached_block = -1
        self._cache: np.ndarray | None = None

    def step_uniforms(self, step: int) -> np.ndarray:
        """(slots, 2) array of uniforms in [0, 1) for the given step."""
        if step < 0:
            raise ValueError("step must be nonnegative")
        block, row = divmod(int(step), self._BLOCK)
        if block != self._cached_block:
            key = np.array([np.uint64(self.seed), np.uint64(block) ^ _STEP_SALT],
                           dtype=np.uint64)
            gen = np.random.Generator(np.random.Philox(key=key))
            self._cache = gen.random((self._BLOCK, self.slots, 2))
            self._cached_block = block
        return self._cache[row]

    def disk_noise(self, step: int, radius: float) -> np.ndarray:
        """(slots, 2) array of vectors drawn uniformly from the disk of the
        given radius (area-uniform: r = R*sqrt(u), angle uniform)."""
        u = self.step_uniforms(step)
        rr = radius * np.sqrt(u[:, 0])
        theta = (2.0 * np.pi) * u[:, 1]
        return np.column_stack([rr * np.cos(theta), rr * np.sin(theta)])

    def pair(self, agent_id: int, step: int) -> np.ndarray:
        """The two uniforms assigned to one agent slot at one step."""
        if not (0 <= agent_id < self.slots):
            raise ValueError("agent_id outside slot range")
        return self.step_uniforms(step)[agent_id]

    def disk(self, agent_id: int, step: int, radius: float) -> np.ndarray:
        """One agent's disk-noise vector at one step."""
        if not (0 <= agent_id < self.slots):
            raise ValueError("agent_id outside slot range")
        return self.disk_noise(step, radius)[agent_id]
