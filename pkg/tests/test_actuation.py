import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from orbitbench.actuation import (
    ActionModel,
    ThrusterLayout,
    compose,
    cubesat_layout,
    map_target_accel,
    map_thrusters,
    map_wheeled_twist,
    twist_to_wheel_speeds,
    wheel_speeds_to_twist,
)
from orbitbench.dynamics import BodyParams
from orbitbench.errors import InvalidActionError, InvalidParameterError
from orbitbench.rng import RngKey


class TestWheeledTwist:
    def test_zero(self):
        assert map_wheeled_twist(np.zeros(2), 0.25, 1.0) == (0.0, 0.0)

    def test_endpoint(self):
        v, w = map_wheeled_twist(np.array([1.0, 0.0]), 0.25, 1.0)
        assert v == 0.25 and w == 0.0

    def test_arithmetic(self):
        v, w = map_wheeled_twist(np.array([0.6, -0.5]), 0.25, 1.0)
        assert v == pytest.approx(0.15, rel=1e-15)
        assert w == -0.5

    def test_clamps(self):
        v, w = map_wheeled_twist(np.array([2.0, -3.0]), 0.25, 1.0)
        assert v == 0.25 and w == -1.0


class TestWheelSpeeds:
    def test_straight(self):
        left, right = twist_to_wheel_speeds(0.15, 0.0, 0.0625, 0.35)
        assert left == pytest.approx(2.4, rel=1e-15)
        assert right == pytest.approx(2.4, rel=1e-15)

    def test_spin(self):
        left, right = twist_to_wheel_speeds(0.0, 1.0, 0.0625, 0.35)
        assert right == pytest.approx(2.8, rel=1e-12)
        assert left == pytest.approx(-2.8, rel=1e-12)

    def test_zero(self):
        assert twist_to_wheel_speeds(0.0, 0.0, 0.0625, 0.35) == (0.0, 0.0)

    def test_rejects_bad_geometry(self):
        with pytest.raises(InvalidParameterError):
            twist_to_wheel_speeds(0.1, 0.0, 0.0, 0.35)
        with pytest.raises(InvalidParameterError):
            wheel_speeds_to_twist(1.0, 1.0, 0.0625, -1.0)

    @settings(max_examples=200, deadline=None)
    @given(
        v=st.floats(-2.0, 2.0), omega=st.floats(-4.0, 4.0),
        r=st.floats(0.01, 0.5), b=st.floats(0.05, 1.0),
    )
    def test_kinematics_invert(self, v, omega, r, b):
        left, right = twist_to_wheel_speeds(v, omega, r, b)
        v2, w2 = wheel_speeds_to_twist(left, right, r, b)
        assert v2 == pytest.approx(v, abs=1e-12)
        assert w2 == pytest.approx(omega, abs=1e-12)


def _single_thruster(pos, direction, thrust=10.0):
    return ThrusterLayout(
        positions=np.array([pos], dtype=float),
        directions=np.array([direction], dtype=float),
        max_thrust=np.array([thrust]),
        flow_rate=np.array([0.01]),
    )


class TestThrusters:
    def test_all_minus_one_is_idle(self):
        layout = cubesat_layout()
        force, torque, flow = map_thrusters(-np.ones(8), layout, fuel=np.array(1.0))
        np.testing.assert_array_equal(force, np.zeros(3))
        np.testing.assert_array_equal(torque, np.zeros(3))
        assert flow == 0.0

    def test_single_thruster_at_origin(self):
        layout = _single_thruster([0, 0, 0], [1, 0, 0])
        force, torque, _ = map_thrusters(np.array([1.0]), layout, np.array(1.0))
        np.testing.assert_array_equal(force, [10.0, 0.0, 0.0])
        np.testing.assert_array_equal(torque, np.zeros(3))

    def test_lever_arm_cross_product(self):
        # (0,1,0) x (10,0,0) = (0,0,-10)
        layout = _single_thruster([0, 1, 0], [1, 0, 0])
        _, torque, _ = map_thrusters(np.array([1.0]), layout, np.array(1.0))
        np.testing.assert_array_equal(torque, [0.0, 0.0, -10.0])

    def test_fuel_gate(self):
        layout = cubesat_layout()
        force, torque, flow = map_thrusters(np.ones(8), layout, fuel=np.array(0.0))
        np.testing.assert_array_equal(force, np.zeros(3))
        np.testing.assert_array_equal(torque, np.zeros(3))
        assert flow == 0.0

    def test_flow_sums_throttles(self):
        layout = cubesat_layout(flow_rate=0.01)
        _, _, flow = map_thrusters(np.zeros(8), layout, np.array(1.0))
        assert flow == pytest.approx(8 * 0.5 * 0.01, rel=1e-12)

    def test_dim_mismatch(self):
        with pytest.raises(InvalidActionError):
            map_thrusters(np.zeros(5), cubesat_layout(), np.array(1.0))

    def test_batched(self):
        layout = cubesat_layout()
        a = np.stack([-np.ones(8), np.ones(8)])
        force, torque, flow = map_thrusters(a, layout, np.array([1.0, 1.0]))
        assert force.shape == (2, 3) and torque.shape == (2, 3) and flow.shape == (2,)
        np.testing.assert_array_equal(force[0], np.zeros(3))

    def test_cubesat_positively_spans_6dof(self):
        # rank 6 plus a strictly positive null throttle vector (Stiemke)
        layout = cubesat_layout()
        lever = np.cross(layout.positions, layout.directions)
        W = np.concatenate([layout.directions, lever], axis=1).T * layout.max_thrust
        assert np.linalg.matrix_rank(W) == 6
        res = linprog(np.zeros(8), A_eq=W, b_eq=np.zeros(6),
                      bounds=[(1, None)] * 8, method="highs")
        assert res.status == 0

    def test_layout_randomization_deterministic(self):
        key = RngKey(3, stream_id=11)
        a = cubesat_layout(key=key)
        b = cubesat_layout(key=key)
        np.testing.assert_array_equal(a.positions, b.positions)
        assert not np.array_equal(a.positions, cubesat_layout().positions)

    def test_layout_validation(self):
        with pytest.raises(InvalidParameterError):
            _single_thruster([0, 0, 0], [1, 1, 0])  # not unit
        with pytest.raises(InvalidParameterError):
            _single_thruster([0, 0, 0], [1, 0, 0], thrust=0.0)


class TestTargetAccel:
    PARAMS = BodyParams(mass=10.0, inertia_diag=(2.0, 2.0, 2.0))

    def test_zero(self):
        force, torque = map_target_accel(np.zeros(6), 1.0, 0.5, self.PARAMS)
        np.testing.assert_array_equal(force, np.zeros(3))
        np.testing.assert_array_equal(torque, np.zeros(3))

    def test_linear_channel(self):
        a = np.array([1.0, 0, 0, 0, 0, 0])
        force, _ = map_target_accel(a, 1.0, 0.5, self.PARAMS)
        np.testing.assert_array_equal(force, [10.0, 0.0, 0.0])

    def test_angular_channel(self):
        a = np.array([0, 0, 0, 0, 0, 1.0])
        _, torque = map_target_accel(a, 1.0, 0.5, self.PARAMS)
        np.testing.assert_array_equal(torque, [0.0, 0.0, 1.0])


class TestCompose:
    def test_singleton(self):
        model = ActionModel(kind="thruster_bank", dim=8)
        comp = compose([model])
        assert comp.total_dim == 8
        assert comp.slices == ((0, 8),)

    def test_two_models(self):
        comp = compose([
            ActionModel(kind="wheeled_twist", dim=2),
            ActionModel(kind="target_accel", dim=6),
        ])
        assert comp.total_dim == 8
        assert comp.slices == ((0, 2), (2, 8))

    def test_dispatch_matches_slicing(self):
        comp = compose([
            ActionModel(kind="wheeled_twist", dim=2),
            ActionModel(kind="target_accel", dim=6),
        ])
        a = np.arange(16.0).reshape(2, 8)
        parts = comp.dispatch(a)
        np.testing.assert_array_equal(parts[0], a[:, :2])
        np.testing.assert_array_equal(parts[1], a[:, 2:])

    def test_empty_rejected(self):
        with pytest.raises(InvalidParameterError):
            compose([])

    def test_dispatch_dim_check(self):
        comp = compose([ActionModel(kind="wheeled_twist", dim=2)])
        with pytest.raises(InvalidActionError):
            comp.dispatch(np.zeros(3))
