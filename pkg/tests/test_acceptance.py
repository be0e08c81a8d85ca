"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines as they complete. Scenario constants (region sizes, demand splits,
field coefficients) are fixed here; seeds are sequential, never cherry-picked.
"""

import json
import math
import time

import numpy as np

from swarmcover import (MetricsGrid, Region, SignalFunction, SignalSumProfile,
                        build_index, build_world, derive_kernel,
                        derived_generator, gaussian_kernel_closed_form,
                        load_scenario, signal_coverage_velocities,
                        total_error)
from swarmcover.cli import main as cli_main
from swarmcover.oracles import FdSpec, brute_force_neighbors, finite_diff_gradient


def _report(name: str, ok: bool, detail: str):
    print(f"\n{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"{name}: {detail}"


def _alloc_doc(seed: int, n_agents: int, demands, disappear: bool) -> str:
    """Charge-style allocation scenario: agents released from the region
    center, targets placed uniformly at random (per seed) with an inset."""
    gen = derived_generator(seed, "target-placement")
    pos = gen.uniform(0.1, 0.9, size=(len(demands), 2))
    return json.dumps({
        "region": {"min": [0, 0], "max": [1, 1]},
        "agents": {"mode": "point", "count": n_agents},
        "sensing_range": 0.25,
        "law": {"kind": "electrostatic"},
        "targets": [{"position": [float(x), float(y)], "demand": int(d)}
                    for (x, y), d in zip(pos, demands)],
        "targets_disappear": disappear,
        "seed": seed,
    })


def test_criterion_1_kernel_matches_closed_form():
    t0 = time.time()
    worst = 0.0
    for lam in (0.5, 1.0, 2.0):
        trunc = 8.0 / math.sqrt(lam)
        table = derive_kernel(SignalFunction.gaussian(lam),
                              grid_step=trunc / 512, quad_resolution=512,
                              truncation_radius=trunc)
        ref = gaussian_kernel_closed_form(table.nodes, lam)
        sel = ref > 1e-6
        worst = max(worst, float(np.max(np.abs(table.values[sel] - ref[sel])
                                        / ref[sel])))
    elapsed = time.time() - t0
    _report("criterion-1 kernel-oracle",
            worst < 1e-3 and elapsed < 120,
            f"max rel err {worst:.2e} (tol 1e-3), {elapsed:.0f}s (< 120s)")


def test_criterion_2_velocity_matches_error_gradient():
    t0 = time.time()
    lam, V = 1.0, 4.0
    region = Region(0, 0, 12, 12)
    signal = SignalFunction.gaussian(lam, cutoff=V)
    kernel = derive_kernel(signal, grid_step=2 * V / 2048, quad_resolution=512)
    grid = MetricsGrid.covering(region, pad=8.0, resolution=1024)
    gen = np.random.default_rng(2024)
    worst, checked = 0.0, 0
    for _ in range(20):
        pts = gen.uniform(V + 0.1, 12 - V - 0.1, size=(7, 2))
        positions, centers = pts[:5], pts[5:]
        demands = gen.integers(1, 4, size=2).astype(float)
        profile = SignalSumProfile.create(region, centers, signal, demands)
        v, _ = signal_coverage_velocities(
            positions, centers, np.ones(2, dtype=bool), kernel,
            tuple(kernel.scaled(d) for d in demands), 2 * V)
        for i in range(5):
            fd = finite_diff_gradient(
                lambda q: total_error(profile, q, signal, grid),
                positions, i, FdSpec(1e-4))
            for ax in range(2):
                if abs(fd[ax]) > 1e-3:
                    worst = max(worst, abs(2 * v[i, ax] - fd[ax]) / abs(fd[ax]))
                    checked += 1
    elapsed = time.time() - t0
    _report("criterion-2 gradient-consistency",
            checked >= 100 and worst < 0.02 and elapsed < 300,
            f"{checked} components, worst rel err {worst:.2e} (tol 0.02), "
            f"{elapsed:.0f}s (< 300s)")


def test_criterion_3_electrostatic_target_assignment():
    t0 = time.time()
    demands = [12, 9, 6, 5, 3]          # total 35 for 60 agents
    satisfied = 0
    for seed in range(1, 21):
        world = build_world(load_scenario(_alloc_doc(seed, 60, demands, False)))
        summary = world.run(20000)
        satisfied += summary["all_targets_satisfied"]
    elapsed = time.time() - t0
    _report("criterion-3 electrostatic-assignment",
            satisfied >= 18 and elapsed < 180,
            f"{satisfied}/20 seeds satisfied every target (need >= 18), "
            f"{elapsed:.0f}s (< 180s)")


def test_criterion_4_dynamic_target_completion():
    demands = [13, 11, 9, 8, 6, 5]      # total 52 for 50 agents
    completed = 0
    monotone = True
    for seed in range(1, 21):
        world = build_world(load_scenario(_alloc_doc(seed, 50, demands, True)))
        done_count = 0
        for _ in range(50000):
            world.step_world()
            now = sum(not t.active for t in world.targets)
            monotone = monotone and now >= done_count
            done_count = now
            if done_count == len(demands):
                break
        completed += done_count == len(demands)
    _report("criterion-4 dynamic-completion",
            completed >= 18 and monotone,
            f"{completed}/20 seeds completed all targets within budget "
            f"(need >= 18); completion counts monotone: {monotone}")


def test_criterion_5_concentration_grows_with_signal_rate():
    t0 = time.time()

    def doc(lam, seed):
        return json.dumps({
            "region": {"min": [0, 0], "max": [2, 2]},
            "agents": {"mode": "uniform", "count": 30,
                       "box": {"min": [0.8, 0.8], "max": [1.2, 1.2]}},
            "sensing_range": 0.3,
            "noise": False,
            "law": {"kind": "signal_coverage", "lambda": lam,
                    "kernel_resolution": 256, "quad_resolution": 256},
            "targets": [{"position": [1.0, 1.0], "demand": 1}],
            "metrics_resolution": 256,
            "seed": seed,
        })

    center = np.array([1.0, 1.0])
    ordered, descents = 0, 0
    for seed in range(1, 11):
        dist = {}
        for lam in (1.0, 1000.0):
            world = build_world(load_scenario(doc(lam, seed)))
            g0 = world.current_error()
            world.run(5000)
            dist[lam] = float(np.mean(np.linalg.norm(world.positions - center,
                                                     axis=1)))
            descents += world.current_error() < g0
        ordered += dist[1000.0] < dist[1.0]
    elapsed = time.time() - t0
    _report("criterion-5 concentration-vs-rate",
            ordered == 10 and descents == 20,
            f"tighter concentration in {ordered}/10 paired seeds (need 10), "
            f"error decreased in {descents}/20 runs (need 20), {elapsed:.0f}s")


def test_criterion_6_scalar_field_behaviors():
    # (a) linear field: centroid displacement aligns with the gradient
    a, b = 2.0, 1.0
    direction = np.array([a, b]) / math.hypot(a, b)
    worst_angle = 0.0
    for seed in (1, 2, 3):
        world = build_world(load_scenario(json.dumps({
            "region": {"min": [0, 0], "max": [40, 40]},
            "agents": {"mode": "uniform", "count": 30,
                       "box": {"min": [19, 19], "max": [21, 21]}},
            "sensing_range": 0.25,
            "noise": False,
            "law": {"kind": "scalar_field",
                    "field": {"kind": "linear", "a": a, "b": b}},
            "seed": seed,
        })))
        c0 = world.positions.mean(axis=0)
        world.run(2000)
        disp = world.positions.mean(axis=0) - c0
        cosang = float(np.dot(disp / np.linalg.norm(disp), direction))
        worst_angle = max(worst_angle, math.degrees(math.acos(min(1.0, cosang))))

    # (b) exponential field: the swarm gathers near the maximum
    gathered = 0
    center = np.array([0.5, 0.5])
    for seed in range(1, 11):
        world = build_world(load_scenario(json.dumps({
            "region": {"min": [0, 0], "max": [1, 1]},
            "agents": {"mode": "uniform", "count": 30},
            "sensing_range": 0.15,
            "noise": False,
            "law": {"kind": "scalar_field",
                    "field": {"kind": "exponential", "c": 4.0, "lambda": 4.0}},
            "seed": seed,
        })))
        d0 = float(np.mean(np.linalg.norm(world.positions - center, axis=1)))
        world.run(5000)
        d1 = float(np.mean(np.linalg.norm(world.positions - center, axis=1)))
        gathered += d1 < d0
    _report("criterion-6 scalar-fields",
            worst_angle < 10.0 and gathered == 10,
            f"centroid within {worst_angle:.2f} deg of the field direction "
            f"(< 10), gathering in {gathered}/10 seeds (need 10)")


def test_criterion_7_invariant_suite(tmp_path):
    t0 = time.time()
    failures = []

    # rotation equivariance at 1e-9, 1000 trials split across the laws
    from swarmcover import (ExponentialFieldProfile, electrostatic_velocities,
                            scalar_field_velocities)
    big = Region(-100, -100, 100, 100)
    kernel = derive_kernel(SignalFunction.gaussian(0.5), grid_step=0.1,
                           quad_resolution=128, truncation_radius=12.0)
    gen = np.random.default_rng(99)
    worst_rot = 0.0
    for _ in range(334):
        while True:
            pts = gen.uniform(-3, 3, size=(15, 2))
            d = np.linalg.norm(pts[:, None] - pts[None, :], axis=-1)
            np.fill_diagonal(d, np.inf)
            if d.min() >= 0.05:
                break
        positions, centers = pts[:12], pts[12:]
        demands = gen.integers(1, 4, size=3).astype(float)
        active = np.ones(3, dtype=bool)
        th = float(gen.uniform(0, 2 * math.pi))
        R = np.array([[math.cos(th), -math.sin(th)],
                      [math.sin(th), math.cos(th)]])
        v1, _ = signal_coverage_velocities(
            positions, centers, active, kernel,
            tuple(kernel.scaled(d_) for d_ in demands), 8.0)
        v2, _ = signal_coverage_velocities(
            positions @ R.T, centers @ R.T, active, kernel,
            tuple(kernel.scaled(d_) for d_ in demands), 8.0)
        worst_rot = max(worst_rot, float(np.max(np.abs(v2 - v1 @ R.T))))
        e1, _ = electrostatic_velocities(positions, centers, demands, active, 4.0)
        e2, _ = electrostatic_velocities(positions @ R.T, centers @ R.T,
                                         demands, active, 4.0)
        worst_rot = max(worst_rot, float(np.max(np.abs(e2 - e1 @ R.T))))
        f1 = ExponentialFieldProfile.create(big, 3.0, 0.7, centers[0])
        f2 = ExponentialFieldProfile.create(big, 3.0, 0.7, R @ centers[0])
        s1, _ = scalar_field_velocities(positions, f1, 4.0)
        s2, _ = scalar_field_velocities(positions @ R.T, f2, 4.0)
        worst_rot = max(worst_rot, float(np.max(np.abs(s2 - s1 @ R.T))))
    if worst_rot >= 1e-9:
        failures.append(f"rotation equivariance worst {worst_rot:.2e}")

    # step bound and containment over randomized noisy runs (10,000 steps)
    for seed in range(20):
        world = build_world(load_scenario(_alloc_doc(seed + 100, 25,
                                                     [4, 3, 3], False)))
        prev = world.positions.copy()
        for _ in range(500):
            world.step_world()
            moved = np.linalg.norm(world.positions - prev, axis=1)
            if moved.max() > world.dynamics.max_step * (1 + 1e-12):
                failures.append(f"step bound violated: {moved.max()}")
                break
            if not np.all(world.region.contains(world.positions)):
                failures.append("containment violated")
                break
            prev = world.positions.copy()

    # step direction invariant under positive velocity scaling, 1000 trials
    from swarmcover import DynamicsConfig, LinearFieldProfile, apply_steps
    cfg = DynamicsConfig("scalar_field", 1.0, delta=0.01, max_step=0.02,
                         noise_enabled=False)
    flat = LinearFieldProfile.create(big, a=0.0, b=0.0)
    worst_scale = 0.0
    for _ in range(1000):
        p = gen.uniform(-5, 5, size=(1, 2))
        v = gen.normal(size=(1, 2))
        base = apply_steps(p, v, cfg, flat, None)
        c = float(gen.uniform(1e-3, 1e3))
        scaled = apply_steps(p, c * v, cfg, flat, None)
        worst_scale = max(worst_scale, float(np.max(np.abs(scaled - base))))
    if worst_scale > 1e-12:
        failures.append(f"scaling invariance worst {worst_scale:.2e}")

    # neighbor queries equal brute force, 1000 randomized trials
    for trial in range(1000):
        n = int(gen.integers(1, 80))
        pts = [(i, tuple(q)) for i, q in
               enumerate(gen.uniform(-10, 10, size=(n, 2)))]
        radius = float(gen.uniform(0.05, 4.0))
        index = build_index(pts, radius)
        q = gen.uniform(-10, 10, size=2)
        r = float(gen.uniform(0, 1)) * radius
        got = sorted(i for i, _, _ in index.neighbors_within(q, r))
        want = sorted(i for i, _, _ in brute_force_neighbors(pts, q, r))
        if got != want:
            failures.append(f"neighbor query mismatch at trial {trial}")
            break

    # seed determinism: byte-identical CSVs from the CLI
    scen = tmp_path / "scenario.json"
    scen.write_text(_alloc_doc(7, 20, [4, 3], True))
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert cli_main(["run", "--scenario", str(scen), "--steps", "500",
                         "--seed", "3", "--out", str(out),
                         "--metrics-every", "100"]) == 0
        outs.append(out)
    for fname in ("trajectory.csv", "metrics.csv", "events.csv"):
        if (outs[0] / fname).read_bytes() != (outs[1] / fname).read_bytes():
            failures.append(f"{fname} not byte-identical across reruns")

    # serialize-resume equals an uninterrupted run
    full = build_world(load_scenario(_alloc_doc(5, 30, [5, 4, 3], True)))
    for _ in range(800):
        full.step_world()
    half = build_world(load_scenario(_alloc_doc(5, 30, [5, 4, 3], True)))
    for _ in range(300):
        half.step_world()
    state = json.dumps(half.state_dict())
    resumed = build_world(load_scenario(_alloc_doc(5, 30, [5, 4, 3], True)))
    resumed.apply_state(json.loads(state))
    for _ in range(500):
        resumed.step_world()
    if not np.array_equal(resumed.positions, full.positions):
        failures.append("resumed trajectory diverged")

    elapsed = time.time() - t0
    _report("criterion-7 invariant-suite",
            not failures and elapsed < 600,
            f"all invariants green, {elapsed:.0f}s (< 600s)"
            if not failures else "; ".join(failures))


def test_criterion_8_resilience_to_agent_loss():
    t0 = time.time()
    demands = [12, 9, 6, 5, 3]
    satisfied = 0
    for seed in range(1, 21):
        world = build_world(load_scenario(_alloc_doc(seed, 60, demands, False)))
        world.run(2000)
        crash = derived_generator(seed, "crash").choice(60, size=15,
                                                        replace=False)
        world.remove_agents(crash)
        summary = world.run(18000)
        satisfied += summary["all_targets_satisfied"]
    elapsed = time.time() - t0
    _report("criterion-8 resilience",
            satisfied >= 16,
            f"{satisfied}/20 seeds satisfied every target after losing 15 of "
            f"60 agents (need >= 16), {elapsed:.0f}s")
