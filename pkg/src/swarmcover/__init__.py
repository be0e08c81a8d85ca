"""Attraction-repulsion swarm dynamics.

A headless simulation engine and CLI for positioning a swarm of oblivious,
sensing-limited agents according to a demand profile: signal coverage,
charge-style target assignment, and scalar-field coverage, with numerically
validated error functionals.
"""

from .dynamics import (DynamicsConfig, ForceReport, apply_step, apply_steps,
                       electrostatic_velocities, electrostatic_velocity,
                       scalar_field_velocities, scalar_field_velocity,
                       signal_coverage_velocities, signal_coverage_velocity)
from .engine import Event, RunSinks, Target, World
from .errors import ConfigError, ScenarioError
from .geometry import Region, SpatialIndex, build_index, neighbors_within, unit_toward
from .kernels import (KernelTable, SignalFunction, derive_kernel,
                      gaussian_kernel_closed_form, kernel_lookup)
from .metrics import (MetricsGrid, ar_gradient, ar_total_error,
                      electrostatic_pair_potential, psi_field, total_error)
from .profiles import (ElectrostaticProfile, ExponentialFieldProfile,
                       LinearFieldProfile, SignalSumProfile, in_support,
                       phi_gradient, phi_value)
from .render import FrameSpec, render_frame
from .rng import RngStream, derived_generator
from .scenario import Scenario, build_world, load_scenario, serialize_scenario

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DynamicsConfig", "ElectrostaticProfile", "Event",
    "ExponentialFieldProfile", "ForceReport", "FrameSpec", "KernelTable",
    "LinearFieldProfile", "MetricsGrid", "Region", "RngStream", "RunSinks",
    "Scenario", "ScenarioError", "SignalFunction", "SignalSumProfile",
    "SpatialIndex", "Target", "World", "apply_step", "apply_steps",
    "ar_gradient", "ar_total_error", "build_index", "build_world",
    "derive_kernel", "derived_generator", "electrostatic_pair_potential",
    "electrostatic_velocities", "electrostatic_velocity",
    "gaussian_kernel_closed_form", "in_support", "kernel_lookup",
    "load_scenario", "neighbors_within", "phi_gradient", "phi_value",
    "psi_field", "render_frame", "scalar_field_velocities",
    "scalar_field_velocity", "serialize_scenario",
    "signal_coverage_velocities", "signal_coverage_velocity",
    "total_error", "unit_toward",
]
