"""Command-line runner.

Subcommands:

* ``run``           simulate a scenario, writing CSVs, frames and a summary
* ``derive-kernel`` tabulate an interaction kernel to a cache file
* ``validate``      parse and constraint-check a scenario, nothing else

Exit codes: 0 success, 1 validation error, 2 runtime error. Diagnostics are
single lines on stderr. Outputs are reproducible byte-for-byte from
(scenario file, seed, flags).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .dynamics import SIGNAL_COVERAGE
from .engine import RunSinks
from .errors import ConfigError, ScenarioError
from .kernels import SignalFunction, derive_kernel, gaussian_kernel_closed_form
from .metrics import phi_on_grid
from .oracles import FdSpec, brute_force_quadrature, finite_diff_gradient
from .geometry import Region
from .render import FrameSpec, render_frame
from .scenario import build_world, load_scenario, serialize_scenario


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmcover",
        description="Attraction-repulsion swarm simulations: signal coverage, "
                    "target assignment, scalar-field coverage.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario")
    run.add_argument("--scenario", required=True, help="scenario JSON file")
    run.add_argument("--steps", type=int, required=True)
    run.add_argument("--seed", type=int, default=None,
                     help="override the scenario's seed")
    run.add_argument("--out", default="out", help="output directory")
    run.add_argument("--metrics-every", type=int, default=0,
                     help="sample telemetry every K steps (0: endpoints only)")
    run.add_argument("--frames-every", type=int, default=0,
                     help="write a frame every K steps (0: no frames)")
    run.add_argument("--frame-size", default="512x512", metavar="WxH")
    run.add_argument("--stop-when-complete", action="store_true",
                     help="stop as soon as every target is completed")

    dk = sub.add_parser("derive-kernel", help="tabulate an interaction kernel")
    dk.add_argument("--lambda", dest="lam", type=float, required=True,
                    help="gaussian signal rate")
    dk.add_argument("--cutoff", type=float, default=None,
                    help="signal cutoff radius (omit for an uncut signal)")
    dk.add_argument("--truncation", type=float, default=None,
                    help="table/integration radius for uncut signals")
    dk.add_argument("--grid-step", type=float, default=None)
    dk.add_argument("--quad-resolution", type=int, default=512)
    dk.add_argument("--out", required=True, help="cache file to write")

    val = sub.add_parser("validate", help="check a scenario file")
    val.add_argument("--scenario", required=True)

    # Numeric self-checks used by acceptance runs; intentionally unadvertised.
    sub.add_parser("validate-numerics")
    return parser


def _parse_frame_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise ScenarioError(f"--frame-size must look like 512x512, got {text!r}") from exc


def _cmd_run(args) -> int:
    scenario = load_scenario(Path(args.scenario).read_text())
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    if args.steps < 0:
        raise ScenarioError("--steps must be nonnegative")
    world = build_world(scenario)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "scenario.resolved.json").write_text(serialize_scenario(scenario))

    frame_writer = None
    frames_every = max(0, args.frames_every)
    if frames_every:
        width, height = _parse_frame_size(args.frame_size)
        frames_dir = out / "frames"
        frames_dir.mkdir(exist_ok=True)
        initial_field = _underlay(world)
        spec = FrameSpec(width, height, sensing_disk=True,
                         field_max=(float(initial_field.max())
                                    if initial_field is not None else None))

        def frame_writer(w, step):
            data = render_frame(w, _underlay(w), spec)
            (frames_dir / f"step_{step:08d}.ppm").write_bytes(data)

    with open(out / "trajectory.csv", "w") as traj, \
            open(out / "metrics.csv", "w") as met, \
            open(out / "events.csv", "w") as ev:
        sinks = RunSinks(trajectory=traj, metrics=met, events=ev,
                         frame_writer=frame_writer, frames_every=frames_every)
        sinks._write(ev, "events", "step,target_id,kind,count", [], 0)
        summary = world.run(args.steps, metrics_every=max(0, args.metrics_every),
                            sinks=sinks,
                            stop_when_complete=args.stop_when_complete)
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return 0


def _underlay(world):
    """Heatmap field for frames: the squared-error field for signal coverage,
    the demand profile itself otherwise (matching the figures' styling)."""
    if world.dynamics.law == SIGNAL_COVERAGE:
        return world.psi()
    field = phi_on_grid(world.profile, world.grid)
    return np.abs(field)


def _cmd_derive_kernel(args) -> int:
    if args.lam <= 0:
        raise ScenarioError("--lambda must be positive")
    cutoff = args.cutoff if args.cutoff is not None else math.inf
    f = SignalFunction.gaussian(args.lam, cutoff)
    table = derive_kernel(f, grid_step=args.grid_step,
                          quad_resolution=args.quad_resolution,
                          truncation_radius=args.truncation)
    table.save(args.out)
    print(f"wrote {args.out}: {len(table.nodes)} nodes, support [0, {table.r_max}]")
    return 0


def _cmd_validate(args) -> int:
    scenario = load_scenario(Path(args.scenario).read_text())
    print(f"ok: {scenario.name}")
    return 0


def _cmd_validate_numerics() -> int:
    """Fast self-checks of the numeric oracles and the kernel pipeline."""
    checks = []

    gauss = brute_force_quadrature(lambda x, y: np.exp(-(x * x + y * y)),
                                   Region(-8, -8, 8, 8), 1024)
    checks.append(("quadrature: planar gaussian mass",
                   abs(gauss - math.pi) / math.pi < 1e-4))

    grad = finite_diff_gradient(lambda q: float(q[0, 0] ** 2), np.zeros((1, 2)),
                                0, FdSpec(1e-3))
    checks.append(("finite differences: quadratic slope",
                   abs(grad[0]) < 1e-6 and abs(grad[1]) < 1e-12))

    table = derive_kernel(SignalFunction.gaussian(1.0), grid_step=0.05,
                          quad_resolution=256, truncation_radius=8.0)
    ref = gaussian_kernel_closed_form(table.nodes, 1.0)
    sel = ref > 1e-6
    rel = np.max(np.abs(table.values[sel] - ref[sel]) / ref[sel])
    checks.append(("kernel quadrature vs closed form", rel < 1e-3))

    ok = True
    for name, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'}  {name}")
        ok = ok and passed
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "derive-kernel":
            return _cmd_derive_kernel(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_validate_numerics()
    except (ScenarioError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, RuntimeError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
