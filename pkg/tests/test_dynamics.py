import numpy as np
import pytest

from orbitbench.dynamics import (
    DOMAIN_PRESETS,
    BodyParams,
    DisturbanceModel,
    DomainRandomization,
    RigidBodyState,
    consume_fuel,
    randomize_domain,
    sample_disturbance,
    step_free_body,
    step_rover_on_terrain,
)
from orbitbench.errors import InvalidParameterError
from orbitbench.noise import NoiseParams
from orbitbench.rng import RngKey, Stream
from orbitbench.rotations import quat_from_yaw, yaw_of
from orbitbench.terrain import Heightfield, TerrainBlueprint, generate_heightfield, sample_height

KEY = RngKey(global_seed=5, stream_id=Stream.DOMAIN)
PARAMS = BodyParams(mass=10.0, inertia_diag=(0.6, 0.6, 0.6), fuel_capacity=2.0)
DR = DomainRandomization()


def _flat_field(extent=8.0, n=9):
    cs = extent / (n - 1)
    return Heightfield(n, n, cs, cs, np.zeros((n, n)))


class TestDomainPresets:
    def test_preset_gravity_values(self):
        expected = {
            "orbit": (0.0, 0.0),
            "asteroid": (0.14, 0.14),
            "moon": (1.62, 0.01),
            "mars": (3.72, 0.01),
            "earth": (9.81, 0.03),
        }
        assert set(DOMAIN_PRESETS) == set(expected)
        for name, (mean, jitter) in expected.items():
            preset = DOMAIN_PRESETS[name]
            assert (preset.g_mean, preset.g_jitter) == (mean, jitter)

    def test_moon_realization_in_band(self):
        for i in range(200):
            dom = randomize_domain(DOMAIN_PRESETS["moon"], DR, KEY.with_counter(i))
            g = -float(dom.gravity[2])
            assert 1.61 <= g <= 1.63

    def test_orbit_exactly_zero(self):
        dom = randomize_domain(DOMAIN_PRESETS["orbit"], DR, KEY)
        assert np.all(dom.gravity == 0.0)

    def test_degenerate_ranges_give_exact_multipliers(self):
        dr = DomainRandomization(
            friction_scale=(1.0, 1.0), inertia_scale=(1.0, 1.0),
            slip_lin=(1.0, 1.0), slip_ang=(1.0, 1.0),
        )
        dom = randomize_domain(DOMAIN_PRESETS["moon"], dr, KEY)
        for name in ("friction_scale", "inertia_scale", "slip_lin", "slip_ang"):
            assert getattr(dom, name) == 1.0

    def test_asteroid_band_closed(self):
        gs = [
            -float(randomize_domain(DOMAIN_PRESETS["asteroid"], DR, KEY.with_counter(i)).gravity[2])
            for i in range(500)
        ]
        assert min(gs) >= 0.0 and max(gs) <= 0.28

    def test_invalid_ranges_rejected(self):
        with pytest.raises(InvalidParameterError):
            randomize_domain(
                DOMAIN_PRESETS["moon"], DomainRandomization(slip_lin=(0.0, 1.0)), KEY
            )
        with pytest.raises(InvalidParameterError):
            randomize_domain(
                DOMAIN_PRESETS["moon"], DomainRandomization(slip_ang=(0.9, 1.2)), KEY
            )

    def test_vectorized_over_envs(self):
        envs = np.arange(16)
        dom = randomize_domain(
            DOMAIN_PRESETS["moon"], DR, RngKey(5, env_index=envs, stream_id=Stream.DOMAIN)
        )
        assert dom.gravity.shape == (16, 3)
        assert len(np.unique(dom.gravity[:, 2])) == 16


class TestDisturbance:
    def test_zero_std_zero_wrench(self):
        force, torque = sample_disturbance(DisturbanceModel(), KEY)
        np.testing.assert_array_equal(force, np.zeros(3))
        np.testing.assert_array_equal(torque, np.zeros(3))

    def test_empirical_std(self):
        model = DisturbanceModel(force_std=1.0, torque_std=0.5)
        key = RngKey(7, stream_id=Stream.DISTURBANCE, counter=np.arange(100_000))
        force, torque = sample_disturbance(model, key)
        for ax in range(3):
            assert 0.98 <= float(force[..., ax].std()) <= 1.02
            assert 0.49 * 0.98 <= float(torque[..., ax].std()) <= 0.51 * 1.02

    def test_pure_in_key(self):
        model = DisturbanceModel(force_std=2.0, torque_std=0.1)
        a = sample_disturbance(model, KEY.with_counter(3))
        b = sample_disturbance(model, KEY.with_counter(3))
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])


class TestFreeBody:
    def test_free_drift(self):
        s = RigidBodyState.at_rest()
        s.lin_vel = np.array([0.5, -0.2, 0.1])
        out = step_free_body(s, PARAMS, np.zeros(3), np.zeros(3), np.zeros(3), 0.02)
        np.testing.assert_array_equal(out.lin_vel, s.lin_vel)
        np.testing.assert_allclose(out.position, s.lin_vel * 0.02, rtol=1e-15)

    def test_moon_gravity_first_step(self):
        s = RigidBodyState.at_rest()
        out = step_free_body(s, PARAMS, np.zeros(3), np.zeros(3),
                             np.array([0.0, 0.0, -1.62]), 0.02)
        assert out.lin_vel[2] == pytest.approx(-0.0324, rel=1e-12)

    def test_velocity_exact_for_constant_gravity_dyadic(self):
        # dyadic g and dt make semi-implicit Euler velocity exact in fp too
        g = np.array([0.0, 0.0, -1.625])
        dt = 1.0 / 64.0
        s = RigidBodyState.at_rest()
        for _ in range(10_000):
            s = step_free_body(s, PARAMS, np.zeros(3), np.zeros(3), g, dt)
        assert s.lin_vel[2] == -1.625 * dt * 10_000

    def test_momentum_conserved_zero_g(self):
        s = RigidBodyState.at_rest()
        s.lin_vel = np.array([1.0, 2.0, 3.0])
        p0 = PARAMS.mass * s.lin_vel
        for _ in range(10_000):
            s = step_free_body(s, PARAMS, np.zeros(3), np.zeros(3), np.zeros(3), 0.02)
        np.testing.assert_allclose(PARAMS.mass * s.lin_vel, p0, rtol=1e-9)

    def test_spherical_inertia_keeps_omega(self):
        s = RigidBodyState.at_rest()
        s.ang_vel = np.array([0.3, -0.2, 0.5])
        out = step_free_body(s, PARAMS, np.zeros(3), np.zeros(3), np.zeros(3), 0.02)
        np.testing.assert_array_equal(out.ang_vel, s.ang_vel)

    def test_quaternion_norm_preserved(self):
        s = RigidBodyState.at_rest()
        s.ang_vel = np.array([0.5, 1.0, -0.7])
        for _ in range(1000):
            s = step_free_body(s, PARAMS, np.zeros(3), np.array([0.01, 0.0, -0.02]),
                               np.zeros(3), 0.02)
            assert abs(np.linalg.norm(s.orientation) - 1.0) <= 1e-6

    def test_torque_spin_up(self):
        s = RigidBodyState.at_rest()
        out = step_free_body(s, PARAMS, np.zeros(3), np.array([0.0, 0.0, 0.6]),
                             np.zeros(3), 0.02)
        assert out.ang_vel[2] == pytest.approx(0.6 / 0.6 * 0.02, rel=1e-15)

    def test_rejects_bad_dt(self):
        with pytest.raises(InvalidParameterError):
            step_free_body(RigidBodyState.at_rest(), PARAMS, np.zeros(3), np.zeros(3),
                           np.zeros(3), 0.0)

    def test_batched(self):
        s = RigidBodyState.at_rest((4,))
        s.lin_vel[:, 0] = np.arange(4.0)
        out = step_free_body(s, PARAMS, np.zeros((4, 3)), np.zeros((4, 3)),
                             np.zeros(3), 0.02)
        np.testing.assert_allclose(out.position[:, 0], np.arange(4.0) * 0.02)


class TestConsumeFuel:
    def test_zero_flow(self):
        s = RigidBodyState.at_rest(fuel=1.0)
        assert consume_fuel(s, 0.0, 0.02).fuel == 1.0

    def test_arithmetic(self):
        s = RigidBodyState.at_rest(fuel=1.0)
        assert consume_fuel(s, 0.5, 0.02).fuel == pytest.approx(0.99, rel=1e-15)

    def test_clamps_at_zero(self):
        s = RigidBodyState.at_rest(fuel=0.001)
        assert consume_fuel(s, 1.0, 0.02).fuel == 0.0

    def test_rejects_negative_flow(self):
        with pytest.raises(InvalidParameterError):
            consume_fuel(RigidBodyState.at_rest(fuel=1.0), -0.1, 0.02)

    def test_monotone_nonincreasing(self):
        s = RigidBodyState.at_rest(fuel=0.05)
        rng = np.random.default_rng(0)
        prev = float(s.fuel)
        for _ in range(1000):
            s = consume_fuel(s, float(rng.uniform(0, 2)), 0.02)
            assert 0.0 <= float(s.fuel) <= prev
            prev = float(s.fuel)


def _still_domain():
    from orbitbench.dynamics import RealizedDomain

    return RealizedDomain(
        gravity=np.array([0.0, 0.0, -1.62]),
        friction_scale=np.array(1.0), inertia_scale=np.array(1.0),
        slip_lin=np.array(1.0), slip_ang=np.array(1.0),
    )


class TestRoverStep:
    def _centered_state(self, hf):
        s = RigidBodyState.at_rest()
        h, _ = sample_height(hf, hf.extent_x / 2, hf.extent_y / 2)
        s.position = np.array([hf.extent_x / 2, hf.extent_y / 2, h])
        return s

    def test_forward_displacement(self):
        hf = _flat_field()
        s = self._centered_state(hf)
        out, realized, oob = step_rover_on_terrain(
            s, (0.15, 0.0), hf, _still_domain(), (np.zeros(3), np.zeros(3)), 0.02,
            PARAMS,
        )
        assert out.position[0] - s.position[0] == pytest.approx(0.003, rel=1e-12)
        assert realized[0] == 0.15
        assert not oob

    def test_pure_rotation(self):
        hf = _flat_field()
        s = self._centered_state(hf)
        out, _, _ = step_rover_on_terrain(
            s, (0.0, 1.0), hf, _still_domain(), (np.zeros(3), np.zeros(3)), 0.02,
            PARAMS,
        )
        assert yaw_of(out.orientation) == pytest.approx(0.02, abs=1e-12)
        np.testing.assert_allclose(out.position[:2], s.position[:2], atol=1e-15)

    def test_z_matches_terrain_everywhere(self):
        bp = TerrainBlueprint()
        hf = generate_heightfield(bp, RngKey(3, stream_id=Stream.TERRAIN))
        s = self._centered_state(hf)
        rng = np.random.default_rng(1)
        for _ in range(200):
            cmd = (float(rng.uniform(-0.5, 0.5)), float(rng.uniform(-1.5, 1.5)))
            s, _, _ = step_rover_on_terrain(
                s, cmd, hf, _still_domain(), (np.zeros(3), np.zeros(3)), 0.02, PARAMS
            )
            h, _ = sample_height(hf, float(s.position[0]), float(s.position[1]))
            assert float(s.position[2]) == h

    def test_slip_scales_twist(self):
        from orbitbench.dynamics import RealizedDomain

        dom = RealizedDomain(
            gravity=np.zeros(3), friction_scale=np.array(1.0),
            inertia_scale=np.array(1.0), slip_lin=np.array(0.9),
            slip_ang=np.array(0.8),
        )
        hf = _flat_field()
        s = self._centered_state(hf)
        _, realized, _ = step_rover_on_terrain(
            s, (0.2, 1.0), hf, dom, (np.zeros(3), np.zeros(3)), 0.02, PARAMS
        )
        assert realized[0] == pytest.approx(0.18, rel=1e-15)
        assert realized[1] == pytest.approx(0.8, rel=1e-15)

    def test_boundary_clamp_flags(self):
        hf = _flat_field()
        s = RigidBodyState.at_rest()
        s.position = np.array([hf.extent_x - 0.001, hf.extent_y / 2, 0.0])
        out, _, oob = step_rover_on_terrain(
            s, (0.5, 0.0), hf, _still_domain(), (np.zeros(3), np.zeros(3)), 0.02,
            PARAMS,
        )
        assert oob
        assert out.position[0] == hf.extent_x

    def test_tilt_follows_normal(self):
        heights = np.array([[0.0, 0.0], [1.0, 1.0]])  # slope along y
        hf = Heightfield(2, 2, 1.0, 1.0, heights)
        s = RigidBodyState.at_rest()
        s.position = np.array([0.5, 0.5, 0.5])
        out, _, _ = step_rover_on_terrain(
            s, (0.0, 0.0), hf, _still_domain(), (np.zeros(3), np.zeros(3)), 0.02,
            PARAMS,
        )
        from orbitbench.rotations import quat_rotate

        up = quat_rotate(out.orientation, np.array([0.0, 0.0, 1.0]))
        _, n = sample_height(hf, 0.5, 0.5)
        np.testing.assert_allclose(up, n, atol=1e-12)
