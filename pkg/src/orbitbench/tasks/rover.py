"""Wheeled-rover tasks: velocity tracking and dynamic waypoint navigation."""

from __future__ import annotations

import numpy as np

from ..dynamics import step_rover_on_terrain
from ..rng import Stream, uniform
from ..rotations import rot6d_from_quat, yaw_of
from .base import ObsEntry, TaskBatch, TaskSpec, exp_kernel


class RoverTaskBatch(TaskBatch):
    """Common rover machinery: spawn on terrain, slip-kinematic stepping."""

    needs_terrain = True

    def _spawn_pose(self, mask):
        # spawn in the middle half of the extent with a uniform heading
        ex, ey = self.stack.extent_x, self.stack.extent_y
        x = self._draw(mask, 0, 0.25 * ex, 0.75 * ex)
        y = self._draw(mask, 1, 0.25 * ey, 0.75 * ey)
        yaw = self._draw(mask, 2, -np.pi, np.pi)
        env_local = np.flatnonzero(mask)
        h, normal = self.stack.sample(env_local, x, y)
        from ..rotations import quat_align_z, quat_from_yaw, quat_mul

        self.state.position[mask] = np.stack([x, y, h], axis=-1)
        self.state.orientation[mask] = quat_mul(quat_align_z(normal), quat_from_yaw(yaw))
        self.state.lin_vel[mask] = 0.0
        self.state.ang_vel[mask] = 0.0

    def _drive(self, a):
        v_cmd, w_cmd = self.mapper.map_twist(a)
        disturbance = self._control_disturbance()
        oob = np.zeros(self.n, dtype=bool)
        for _ in range(self.decimation):
            self.state, realized, sub_oob = step_rover_on_terrain(
                self.state, (v_cmd, w_cmd), self.stack, self.dom, disturbance,
                self.dt, self.params,
            )
            oob |= sub_oob
        self.last_twist = np.stack(realized, axis=-1)
        return realized, oob

    def _common_obs(self):
        return {
            "position": self.state.position,
            "rotation6d": rot6d_from_quat(self.state.orientation),
            "lin_vel": self.state.lin_vel,
            "ang_vel": self.state.ang_vel,
            "gravity": np.broadcast_to(self.dom.gravity, (self.n, 3)),
        }

    def _proprio_obs(self):
        return {
            "twist": self.last_twist,
            "fuel_fraction": self.fuel_fraction(),
            "last_action": self.prev_action,
        }


class VelocityTrackingBatch(RoverTaskBatch):
    """Follow piecewise-constant twist commands; scored by exp kernels."""

    obs_spec = [
        ObsEntry("state", "position", 3, True),
        ObsEntry("state", "rotation6d", 6, True),
        ObsEntry("state", "lin_vel", 3, True),
        ObsEntry("state", "ang_vel", 3, True),
        ObsEntry("state", "gravity", 3, True),
        ObsEntry("proprioception", "twist", 2, True),
        ObsEntry("proprioception", "fuel_fraction", 1, True),
        ObsEntry("proprioception", "last_action", -1, False),
        ObsEntry("command", "target_twist", 2, True),
    ]

    def __init__(self, ctx):
        self.command = None
        super().__init__(ctx)

    def _reset_task_state(self, mask):
        if self.command is None:
            self.command = np.zeros((self.n, 2))
            self.segment = np.full(self.n, -1, dtype=np.int64)
            self.track_sum = np.zeros(self.n)
        self.track_sum[mask] = 0.0
        self.segment[mask] = -1
        self._spawn_pose(mask)
        self._maybe_resample_command(np.flatnonzero(mask))

    def _maybe_resample_command(self, candidates=None):
        steps_per_cmd = max(
            1, int(round(self.spec.params["command_interval_s"] / (self.dt * self.decimation)))
        )
        seg = self.t // steps_per_cmd
        stale = seg != self.segment
        if candidates is not None:
            pick = np.zeros(self.n, dtype=bool)
            pick[candidates] = True
            stale = stale & pick
        if not stale.any():
            return
        v_lim = self.spec.params["v_cmd_max"]
        w_lim = self.spec.params["omega_cmd_max"]
        key = self._key(Stream.COMMAND, seg[stale], stale)
        self.command[stale, 0] = (uniform(key, 0) * 2.0 - 1.0) * v_lim
        self.command[stale, 1] = (uniform(key, 1) * 2.0 - 1.0) * w_lim
        self.segment[stale] = seg[stale]

    def _advance(self, a):
        self._maybe_resample_command()
        (v_eff, w_eff), oob = self._drive(a)
        p = self.spec.params
        lin = exp_kernel((v_eff - self.command[:, 0]) ** 2, p["sigma_lin"])
        ang = exp_kernel((w_eff - self.command[:, 1]) ** 2, p["sigma_ang"])
        rate = np.sum((a - self.prev_action) ** 2, axis=-1)
        self.track_sum += 0.5 * (lin + ang)
        terms = {"track_lin": lin, "track_ang": ang, "action_rate": rate}
        terminated = np.zeros(self.n, dtype=bool)
        success = np.zeros(self.n, dtype=bool)
        return terms, terminated, success, {"out_of_bounds": oob}

    def _truncation_success(self, truncated):
        mean_track = self.track_sum / np.maximum(self.t, 1)
        return mean_track >= self.spec.params["success_mean_tracking"]

    def _observe(self):
        raw = {
            "state": self._common_obs(),
            "proprioception": self._proprio_obs(),
            "command": {"target_twist": self.command},
        }
        return self._finalize_obs(raw)


def velocity_tracking_spec(domain) -> TaskSpec:
    return TaskSpec(
        task_id="velocity_tracking",
        domain=domain,
        max_episode_steps=1000,
        weights={"track_lin": 0.5, "track_ang": 0.5, "action_rate": -0.05},
        params={
            "v_cmd_max": 0.3,
            "omega_cmd_max": 0.6,
            "command_interval_s": 3.0,
            "sigma_lin": 0.1,
            "sigma_ang": 0.2,
            "success_mean_tracking": 0.8,
        },
        success_definition="mean_tracking>=0.8",
    )


class WaypointNavigationBatch(RoverTaskBatch):
    """Chase a sequence of planar waypoints; success after reaching K."""

    obs_spec = [
        ObsEntry("state", "position", 3, True),
        ObsEntry("state", "rotation6d", 6, True),
        ObsEntry("state", "lin_vel", 3, True),
        ObsEntry("state", "ang_vel", 3, True),
        ObsEntry("state", "gravity", 3, True),
        ObsEntry("state", "waypoint", 2, True),
        ObsEntry("proprioception", "twist", 2, True),
        ObsEntry("proprioception", "fuel_fraction", 1, True),
        ObsEntry("proprioception", "last_action", -1, False),
        ObsEntry("command", "waypoint_body", 2, True),
    ]

    def __init__(self, ctx):
        self.waypoint = None
        super().__init__(ctx)

    def _reset_task_state(self, mask):
        if self.waypoint is None:
            self.waypoint = np.zeros((self.n, 2))
            self.wp_index = np.zeros(self.n, dtype=np.int64)
            self.reached = np.zeros(self.n, dtype=np.int64)
            self.hold = np.zeros(self.n, dtype=np.int64)
            self.prev_dist = np.zeros(self.n)
        self._spawn_pose(mask)
        self.wp_index[mask] = 0
        self.reached[mask] = 0
        self.hold[mask] = 0
        self._spawn_waypoint(mask)

    def _spawn_waypoint(self, mask):
        ex, ey = self.stack.extent_x, self.stack.extent_y
        half = self.spec.params["waypoint_box_half"]
        key = self._key(Stream.WAYPOINT, self.wp_index[mask], mask)
        self.waypoint[mask, 0] = 0.5 * ex - half + uniform(key, 0) * 2.0 * half
        self.waypoint[mask, 1] = 0.5 * ey - half + uniform(key, 1) * 2.0 * half
        self.prev_dist[mask] = np.hypot(
            self.waypoint[mask, 0] - self.state.position[mask, 0],
            self.waypoint[mask, 1] - self.state.position[mask, 1],
        )

    def _advance(self, a):
        _, oob = self._drive(a)
        p = self.spec.params
        delta = self.waypoint - self.state.position[:, :2]
        dist = np.hypot(delta[:, 0], delta[:, 1])
        progress = self.prev_dist - dist

        yaw = yaw_of(self.state.orientation)
        bearing = np.arctan2(delta[:, 1], delta[:, 0]) - yaw
        heading = np.cos(bearing)

        rate = np.sum((a - self.prev_action) ** 2, axis=-1)

        near = dist <= p["waypoint_radius"]
        self.hold = np.where(near, self.hold + 1, 0)
        reach_now = self.hold >= int(p["hold_steps"])
        reach_bonus = reach_now.astype(float)

        self.prev_dist = dist
        if reach_now.any():
            self.reached[reach_now] += 1
            self.wp_index[reach_now] += 1
            self.hold[reach_now] = 0
            self._spawn_waypoint(reach_now)

        success = self.reached >= int(p["waypoints_to_win"])
        terminated = success.copy()
        terms = {
            "progress": progress,
            "heading": heading,
            "action_rate": rate,
            "reach": reach_bonus,
        }
        return terms, terminated, success, {"out_of_bounds": oob}

    def _observe(self):
        delta = self.waypoint - self.state.position[:, :2]
        yaw = yaw_of(self.state.orientation)
        c, s = np.cos(yaw), np.sin(yaw)
        body = np.stack(
            [c * delta[:, 0] + s * delta[:, 1], -s * delta[:, 0] + c * delta[:, 1]],
            axis=-1,
        )
        raw = {
            "state": {**self._common_obs(), "waypoint": self.waypoint},
            "proprioception": self._proprio_obs(),
            "command": {"waypoint_body": body},
        }
        return self._finalize_obs(raw)


def waypoint_navigation_spec(domain) -> TaskSpec:
    # box sized so three hops plus holds fit the episode budget with margin
    # under worst-case slip
    return TaskSpec(
        task_id="waypoint_navigation",
        domain=domain,
        max_episode_steps=1000,
        weights={"progress": 1.0, "heading": 0.1, "action_rate": -0.05, "reach": 10.0},
        params={
            "waypoint_box_half": 1.25,
            "waypoint_radius": 0.1,
            "hold_steps": 10,
            "waypoints_to_win": 3,
        },
        success_definition="waypoints_reached>=3",
    )
