"""Scripted reference policies: feasibility oracles and random baselines.

These are deliberately simple controllers that read only the observation
bundle, proving the tasks are solvable under default randomization.  The
random policy draws its actions from the engine's keyed generator so any
consumer can reproduce the exact same action sequence from the seed.
"""

from __future__ import annotations

import numpy as np

from .rng import RngKey, Stream, uniform_lanes
from .rotations import rot6d_decode


class RandomPolicy:
    """Uniform actions in [-1, 1], a pure function of (seed, env, step)."""

    def __init__(self, action_dim: int, num_envs: int, seed: int):
        self.action_dim = action_dim
        self.env_ids = np.arange(num_envs, dtype=np.int64)
        self.seed = seed

    def __call__(self, obs, t: int) -> np.ndarray:
        key = RngKey(self.seed, self.env_ids, 0, int(Stream.POLICY), t)
        return uniform_lanes(key, self.action_dim) * 2.0 - 1.0


class ZeroPolicy:
    def __init__(self, action_dim: int, num_envs: int):
        self.shape = (num_envs, action_dim)

    def __call__(self, obs, t: int) -> np.ndarray:
        return np.zeros(self.shape)


class WaypointOracle:
    """Proportional turn-then-drive controller for planar waypoint chasing.

    Stops dead inside the waypoint radius so the hold condition can latch.
    """

    def __init__(
        self,
        turn_gain: float = 3.0,
        speed_gain: float = 3.0,
        stop_radius: float = 0.06,
    ):
        self.turn_gain = turn_gain
        self.speed_gain = speed_gain
        self.stop_radius = stop_radius

    def __call__(self, obs, t: int) -> np.ndarray:
        wp = obs["command"]["waypoint_body"]
        dist = np.hypot(wp[:, 0], wp[:, 1])
        bearing = np.arctan2(wp[:, 1], wp[:, 0])

        steer = np.clip(self.turn_gain * bearing, -1.0, 1.0)
        # keep driving while turning, scaled down as misalignment grows
        align = np.clip(np.cos(bearing), 0.0, 1.0)
        drive = np.clip(self.speed_gain * dist, 0.0, 1.0) * align * align

        parked = dist < self.stop_radius
        drive = np.where(parked, 0.0, drive)
        steer = np.where(parked, 0.0, steer)
        return np.stack([drive, steer], axis=-1).astype(np.float64)


class LandingOracle:
    """Gravity-compensating descent profile for the target_accel model.

    Tracks a reference vertical speed that shrinks with altitude, damps
    horizontal drift, and keeps the craft upright with a rate/attitude PD.
    """

    def __init__(
        self,
        a_lin_max: float = 5.0,
        a_ang_max: float = 2.0,
        descent_gain: float = 0.25,
        descent_floor: float = 0.12,
        descent_cap: float = 1.0,
        vel_gain: float = 3.0,
        lateral_gain: float = 2.0,
        spin_gain: float = 4.0,
        upright_gain: float = 6.0,
    ):
        self.a_lin_max = a_lin_max
        self.a_ang_max = a_ang_max
        self.descent_gain = descent_gain
        self.descent_floor = descent_floor
        self.descent_cap = descent_cap
        self.vel_gain = vel_gain
        self.lateral_gain = lateral_gain
        self.spin_gain = spin_gain
        self.upright_gain = upright_gain

    def __call__(self, obs, t: int) -> np.ndarray:
        alt = obs["state"]["altitude"][:, 0].astype(np.float64)
        vel = obs["state"]["lin_vel"].astype(np.float64)
        grav = obs["state"]["gravity"].astype(np.float64)
        omega = obs["state"]["ang_vel"].astype(np.float64)
        rot = rot6d_decode(obs["state"]["rotation6d"].astype(np.float64))

        v_ref = -np.clip(self.descent_gain * alt + self.descent_floor,
                         self.descent_floor, self.descent_cap)
        az = self.vel_gain * (v_ref - vel[:, 2]) - grav[:, 2]
        ax = -self.lateral_gain * vel[:, 0]
        ay = -self.lateral_gain * vel[:, 1]
        # acceleration channels act in the body frame: rotate the world wish
        lin_world = np.stack([ax, ay, az], axis=-1)
        lin = np.einsum("nji,nj->ni", rot, lin_world) / self.a_lin_max

        # world up expressed in the body frame is the third row of R
        up_body = rot[:, 2, :]
        tilt_err = np.cross(np.broadcast_to([0.0, 0.0, 1.0], up_body.shape), up_body)
        ang = (self.upright_gain * tilt_err - self.spin_gain * omega) / self.a_ang_max

        return np.clip(np.concatenate([lin, ang], axis=-1), -1.0, 1.0)


def make_policy(name: str, action_dim: int, num_envs: int, seed: int, task_id: str):
    """Resolve a policy id from the CLI into a callable."""
    if name == "random":
        return RandomPolicy(action_dim, num_envs, seed)
    if name == "zero":
        return ZeroPolicy(action_dim, num_envs)
    if name == "oracle":
        if task_id == "waypoint_navigation":
            return WaypointOracle()
        if task_id == "landing":
            return LandingOracle()
        raise ValueError(f"no scripted oracle is defined for task {task_id!r}")
    raise ValueError(f"unknown policy {name!r} (random | zero | oracle)")
