import numpy as np
import pytest

from swarmcover import (ElectrostaticProfile, ExponentialFieldProfile,
                        LinearFieldProfile, Region, SignalFunction,
                        SignalSumProfile, in_support, phi_gradient, phi_value)
from swarmcover.oracles import FdSpec, finite_diff_gradient

REGION = Region(0.0, 0.0, 4.0, 4.0)


def _signal_sum():
    return SignalSumProfile.create(
        REGION, centers=[[1.5, 1.5], [2.5, 2.0]],
        signals=SignalFunction.gaussian(3.0, cutoff=1.0),
        demands=[2, 1])


def _profiles():
    return {
        "signal_sum": _signal_sum(),
        "linear": LinearFieldProfile.create(REGION, a=1.0, b=2.0),
        "exponential": ExponentialFieldProfile.create(REGION, c=4.0, lam=2.0,
                                                      center=[2.0, 2.0]),
        "electrostatic": ElectrostaticProfile.create(
            REGION, centers=[[1.5, 1.5], [2.5, 2.0]], demands=[3, 2],
            sensing_range=1.0),
    }


class TestValues:
    def test_zero_outside_region_for_every_kind(self):
        for name, profile in _profiles().items():
            assert phi_value(profile, (-0.5, 2.0)) == 0.0, name
            assert phi_value(profile, (2.0, 4.2)) == 0.0, name

    def test_signal_sum_at_its_center(self):
        # baseline 1 plus demand 2 times f(0) = 1
        assert phi_value(_signal_sum(), (1.5, 1.5)) == pytest.approx(3.0)

    def test_linear_value(self):
        profile = LinearFieldProfile.create(Region(0, 0, 1, 1), a=1.0, b=2.0)
        assert phi_value(profile, (0.5, 0.5)) == pytest.approx(1.5)

    def test_nonnegative_inside_for_positive_parameters(self):
        rng = np.random.default_rng(0)
        pts = rng.uniform(0, 4, size=(200, 2))
        assert np.all(_profiles()["signal_sum"].value(pts) >= 0)
        assert np.all(_profiles()["exponential"].value(pts) >= 0)

    def test_electrostatic_cutoff_limits_contributions(self):
        profile = _profiles()["electrostatic"]
        # (0.2, 1.5) is 1.3 from the first center and ~2.35 from the second
        assert phi_value(profile, (0.2, 1.5)) == 0.0
        near = phi_value(profile, (1.0, 1.5))   # 0.5 from first center only
        assert near == pytest.approx(-3.0 / 0.5)


class TestSupport:
    def test_support_is_the_closed_region(self):
        profile = _profiles()["linear"]
        assert in_support(profile, (2.0, 2.0))
        assert in_support(profile, (0.0, 0.0))
        assert in_support(profile, (4.0, 2.0))
        assert not in_support(profile, (4.0 + 1e-9, 2.0))


class TestGradients:
    def test_linear_gradient_everywhere_inside(self):
        g, interior = phi_gradient(_profiles()["linear"], (0.7, 3.1))
        assert interior
        assert np.allclose(g, [1.0, 2.0])

    def test_exponential_gradient_vanishes_at_its_peak(self):
        g, interior = phi_gradient(_profiles()["exponential"], (2.0, 2.0))
        assert interior
        assert np.allclose(g, [0.0, 0.0])

    def test_electrostatic_unit_case(self):
        profile = ElectrostaticProfile.create(REGION, centers=[[2.0, 2.0]],
                                              demands=[3], sensing_range=1.5)
        g, interior = phi_gradient(profile, (1.0, 2.0))  # distance 1
        assert interior
        assert np.allclose(g, [3.0, 0.0])  # magnitude 3, toward the center

    def test_boundary_gives_zero_with_flag(self):
        g, interior = phi_gradient(_profiles()["linear"], (0.0, 2.0))
        assert not interior
        assert np.all(g == 0.0)
        g, interior = phi_gradient(_profiles()["linear"], (-1.0, 2.0))
        assert not interior

    def test_matches_finite_differences_for_field_kinds(self):
        rng = np.random.default_rng(21)
        spec = FdSpec(1e-6)
        profiles = _profiles()
        for name in ("signal_sum", "linear", "exponential"):
            profile = profiles[name]
            checked = 0
            while checked < 500:
                p = rng.uniform(0.2, 3.8, size=2)
                g, interior = phi_gradient(profile, p)
                assert interior
                fd = finite_diff_gradient(
                    lambda q: float(profile.value(q[0])), p[None, :], 0, spec)
                scale = max(float(np.linalg.norm(fd)), 1e-3)
                assert np.all(np.abs(g - fd) / scale < 1e-4), name
                checked += 1

    def test_electrostatic_is_the_attraction_orientation(self):
        # The stored potential is a sum of -n/r wells, so its calculus
        # gradient is the negation of the toward-center vector the dynamics
        # use. Check both magnitude and that exact sign relationship.
        profile = _profiles()["electrostatic"]
        rng = np.random.default_rng(5)
        spec = FdSpec(1e-6)
        checked = 0
        while checked < 200:
            p = rng.uniform(0.6, 3.4, size=2)
            r = np.linalg.norm(profile.centers - p, axis=1)
            if np.any(r < 0.05) or np.any(np.abs(r - profile.sensing_range) < 0.05):
                continue  # clamp region or cutoff ring: value not differentiable
            g, interior = phi_gradient(profile, p)
            assert interior
            fd = finite_diff_gradient(
                lambda q: float(profile.value(q[0])), p[None, :], 0, spec)
            scale = max(float(np.linalg.norm(fd)), 1e-3)
            assert np.all(np.abs(g + fd) / scale < 1e-4)
            checked += 1

    def test_active_mask_removes_contributions(self):
        profile = _signal_sum().with_active([False, True])
        assert phi_value(profile, (1.5, 1.5)) == pytest.approx(1.0)  # baseline only
        g, _ = phi_gradient(profile, (1.2, 1.5))
        # only the second, distant center remains; it is out of reach (cutoff 1.0)
        assert np.allclose(g, 0.0)


class TestValidation:
    def test_rejects_demand_below_one(self):
        with pytest.raises(ValueError):
            SignalSumProfile.create(REGION, [[1, 1]],
                                    SignalFunction.gaussian(1.0, 0.5), [0.5])

    def test_rejects_mismatched_lists(self):
        with pytest.raises(ValueError):
            ElectrostaticProfile.create(REGION, [[1, 1]], [1, 2], 1.0)
