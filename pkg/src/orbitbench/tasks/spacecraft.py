"""Spacecraft tasks: landing, rendezvous, obstacle evasion, 3D waypoints."""

from __future__ import annotations

import numpy as np

from ..dynamics import consume_fuel, step_free_body
from ..rng import Stream, normal, uniform
from ..rotations import (
    quat_from_yaw,
    quat_rotate,
    quat_rotate_inv,
    quat_step_body,
    rot6d_from_quat,
)
from .base import ObsEntry, TaskBatch, TaskSpec, exp_kernel


class CraftTaskBatch(TaskBatch):
    """Free-flying rigid body driven by a thruster bank or accel targets."""

    def _burn(self, a):
        """One control step: map, disturb, integrate decimation substeps."""
        force_b, torque_b, flow = self.mapper.map_wrench(a, self.state.fuel)
        dist_force, dist_torque = self._control_disturbance()
        torque = torque_b + dist_torque
        for _ in range(self.decimation):
            force_w = quat_rotate(self.state.orientation, force_b) + dist_force
            self.state = step_free_body(
                self.state, self.params, force_w, torque, self.dom.gravity,
                self.dt, inertia=self.inertia_eff,
            )
            self.state = consume_fuel(self.state, flow, self.dt)
        body_v = quat_rotate_inv(self.state.orientation, self.state.lin_vel)
        self.last_twist = np.concatenate([body_v, self.state.ang_vel], axis=-1)
        return flow * self.dt * self.decimation

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

    def _spawn_free(self, mask, center, half_box, vel_half, spin_half):
        pos = np.stack(
            [self._draw(mask, i, center[i] - half_box[i], center[i] + half_box[i])
             for i in range(3)],
            axis=-1,
        )
        vel = np.stack(
            [self._draw(mask, 3 + i, -vel_half[i], vel_half[i]) for i in range(3)],
            axis=-1,
        )
        spin = np.stack(
            [self._draw(mask, 6 + i, -spin_half, spin_half) for i in range(3)], axis=-1
        )
        yaw = self._draw(mask, 9, -np.pi, np.pi)
        self.state.position[mask] = pos
        self.state.lin_vel[mask] = vel
        self.state.ang_vel[mask] = spin
        self.state.orientation[mask] = quat_from_yaw(yaw)
        if self.last_twist.shape[-1] != 6:
            self.last_twist = np.zeros((self.n, 6))
        self.last_twist[mask] = 0.0


class LandingBatch(CraftTaskBatch):
    """Powered descent onto procedural terrain with limited fuel."""

    needs_terrain = True
    obs_spec = [
        ObsEntry("state", "position", 3, True),
        ObsEntry("state", "rotation6d", 6, True),
        ObsEntry("state", "lin_vel", 3, True),
        ObsEntry("state", "ang_vel", 3, True),
        ObsEntry("state", "gravity", 3, True),
        ObsEntry("state", "altitude", 1, True),
        ObsEntry("proprioception", "twist", 6, True),
        ObsEntry("proprioception", "fuel_fraction", 1, True),
        ObsEntry("proprioception", "last_action", -1, False),
        ObsEntry("command", "pad_body", 3, True),
    ]

    def __init__(self, ctx):
        self.prev_alt = None
        super().__init__(ctx)

    def _pad_points(self):
        cx = 0.5 * self.stack.extent_x
        cy = 0.5 * self.stack.extent_y
        h, _ = self.stack.sample(
            np.arange(self.n), np.full(self.n, cx), np.full(self.n, cy)
        )
        return np.stack([np.full(self.n, cx), np.full(self.n, cy), h], axis=-1)

    def _altitude(self):
        x = np.clip(self.state.position[:, 0], 0.0, self.stack.extent_x)
        y = np.clip(self.state.position[:, 1], 0.0, self.stack.extent_y)
        h, _ = self.stack.sample(np.arange(self.n), x, y)
        return self.state.position[:, 2] - h

    def _reset_task_state(self, mask):
        if self.prev_alt is None:
            self.prev_alt = np.zeros(self.n)
        self.pad = self._pad_points()  # terrain may have been regenerated
        p = self.spec.params
        cx = 0.5 * self.stack.extent_x
        cy = 0.5 * self.stack.extent_y
        self._spawn_free(
            mask,
            center=(cx, cy, 0.0),
            half_box=(p["spawn_radius"], p["spawn_radius"], 0.0),
            vel_half=(0.2, 0.2, 0.0),
            spin_half=p["spawn_spin"],
        )
        # drop the craft at its initial altitude above the local surface
        idx = np.flatnonzero(mask)
        h, _ = self.stack.sample(idx, self.state.position[mask, 0], self.state.position[mask, 1])
        alt0 = self._draw(mask, 10, p["spawn_alt_min"], p["spawn_alt_max"])
        self.state.position[mask, 2] = h + alt0
        self.state.lin_vel[mask, 2] = self._draw(mask, 11, -0.8, -0.2)
        self.prev_alt[mask] = alt0

    def _advance(self, a):
        p = self.spec.params
        fuel_used = self._burn(a)
        alt = self._altitude()
        descent = self.prev_alt - alt
        self.prev_alt = alt

        speed = np.linalg.norm(self.state.lin_vel, axis=-1)
        gate = alt < p["velocity_gate_altitude"]
        vel_pen = speed * gate

        rate = np.sum((a - self.prev_action) ** 2, axis=-1)

        touched = alt <= p["touch_altitude"]
        up_z = quat_rotate(self.state.orientation, np.broadcast_to([0.0, 0.0, 1.0], (self.n, 3)))[:, 2]
        upright = up_z >= np.cos(p["tilt_max"])
        soft = touched & (speed <= p["soft_speed"]) & upright
        crash = touched & ~soft

        terms = {
            "descent": descent,
            "velocity_near_ground": vel_pen,
            "fuel": fuel_used,
            "action_rate": rate,
            "soft_landing": soft.astype(float),
            "crash": crash.astype(float),
        }
        return terms, touched, soft, {"out_of_bounds": np.zeros(self.n, dtype=bool)}

    def _observe(self):
        pad_body = quat_rotate_inv(self.state.orientation, self.pad - self.state.position)
        raw = {
            "state": {**self._common_obs(), "altitude": self._altitude()},
            "proprioception": self._proprio_obs(),
            "command": {"pad_body": pad_body},
        }
        return self._finalize_obs(raw)


def landing_spec(domain) -> TaskSpec:
    return TaskSpec(
        task_id="landing",
        domain=domain,
        max_episode_steps=1000,
        weights={
            "descent": 1.0,
            "velocity_near_ground": -0.5,
            "fuel": -0.1,
            "action_rate": -0.05,
            "soft_landing": 50.0,
            "crash": -25.0,
        },
        params={
            "spawn_radius": 2.0,
            "spawn_alt_min": 8.0,
            "spawn_alt_max": 12.0,
            "spawn_spin": 0.02,
            "velocity_gate_altitude": 2.0,
            "touch_altitude": 0.15,
            "soft_speed": 0.5,
            "tilt_max": 0.3,
        },
        success_definition="soft_touchdown",
    )


class RendezvousBatch(CraftTaskBatch):
    """Match the state of a tumbling free-flyer without colliding."""

    obs_spec = [
        ObsEntry("state", "position", 3, True),
        ObsEntry("state", "rotation6d", 6, True),
        ObsEntry("state", "lin_vel", 3, True),
        ObsEntry("state", "ang_vel", 3, True),
        ObsEntry("state", "gravity", 3, True),
        ObsEntry("state", "rel_target_pos", 3, True),
        ObsEntry("state", "rel_target_vel", 3, True),
        ObsEntry("state", "rel_target_spin", 3, True),
        ObsEntry("state", "target_rotation6d", 6, True),
        ObsEntry("proprioception", "twist", 6, True),
        ObsEntry("proprioception", "fuel_fraction", 1, True),
        ObsEntry("proprioception", "last_action", -1, False),
        ObsEntry("command", "goal_body", 3, True),
        ObsEntry("command", "goal_vel_body", 3, True),
    ]

    def __init__(self, ctx):
        self.target_pos = None
        super().__init__(ctx)

    def _reset_task_state(self, mask):
        if self.target_pos is None:
            self.target_pos = np.zeros((self.n, 3))
            self.target_vel = np.zeros((self.n, 3))
            self.target_spin = np.zeros((self.n, 3))
            self.target_quat = np.zeros((self.n, 4))
            self.target_quat[:, 0] = 1.0
            self.prev_dist = np.zeros(self.n)
            self.match_streak = np.zeros(self.n, dtype=np.int64)
        p = self.spec.params
        self._spawn_free(mask, (0.0, 0.0, 0.0), (0.5, 0.5, 0.5), (0.05,) * 3, 0.02)
        # tumbling target on a shell around the chaser
        key = self._key(Stream.TUMBLE, 0, mask)
        direction = np.stack([normal(key, i) for i in range(3)], axis=-1)
        direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
        radius = self._draw(mask, 20, p["spawn_dist_min"], p["spawn_dist_max"])
        self.target_pos[mask] = self.state.position[mask] + direction * radius[:, None]
        self.target_vel[mask] = np.stack(
            [self._draw(mask, 21 + i, -0.1, 0.1) for i in range(3)], axis=-1
        )
        self.target_spin[mask] = np.stack(
            [self._draw(mask, 24 + i, -p["tumble_max"], p["tumble_max"]) for i in range(3)],
            axis=-1,
        )
        self.target_quat[mask] = quat_from_yaw(self._draw(mask, 27, -np.pi, np.pi))
        self.match_streak[mask] = 0
        self.prev_dist[mask] = np.linalg.norm(
            self.target_pos[mask] - self.state.position[mask], axis=-1
        )

    def _advance(self, a):
        p = self.spec.params
        fuel_used = self._burn(a)
        dt_ctrl = self.dt * self.decimation
        # torque-free spherical tumble: constant spin, drifting position
        self.target_pos = self.target_pos + self.target_vel * dt_ctrl
        self.target_quat = quat_step_body(self.target_quat, self.target_spin, dt_ctrl)

        rel = self.target_pos - self.state.position
        dist = np.linalg.norm(rel, axis=-1)
        progress = self.prev_dist - dist
        self.prev_dist = dist

        dvel = np.linalg.norm(self.target_vel - self.state.lin_vel, axis=-1)
        spin_world = quat_rotate(self.state.orientation, self.state.ang_vel)
        dspin = np.linalg.norm(self.target_spin - spin_world, axis=-1)

        vel_match = exp_kernel(dvel**2, p["sigma_vel"])
        spin_match = exp_kernel(dspin**2, p["sigma_spin"])
        rate = np.sum((a - self.prev_action) ** 2, axis=-1)

        matched = (dist <= p["pos_tol"]) & (dvel <= p["vel_tol"]) & (dspin <= p["spin_tol"])
        self.match_streak = np.where(matched, self.match_streak + 1, 0)
        success = self.match_streak >= int(p["hold_steps"])
        collided = dist < p["keepout_radius"]
        terminated = success | collided

        terms = {
            "progress": progress,
            "velocity_match": vel_match,
            "spin_match": spin_match,
            "action_rate": rate,
            "fuel": fuel_used,
        }
        return terms, terminated, success, {"out_of_bounds": np.zeros(self.n, dtype=bool)}

    def _observe(self):
        rel = self.target_pos - self.state.position
        raw = {
            "state": {
                **self._common_obs(),
                "rel_target_pos": rel,
                "rel_target_vel": self.target_vel - self.state.lin_vel,
                "rel_target_spin": self.target_spin
                - quat_rotate(self.state.orientation, self.state.ang_vel),
                "target_rotation6d": rot6d_from_quat(self.target_quat),
            },
            "proprioception": self._proprio_obs(),
            "command": {
                "goal_body": quat_rotate_inv(self.state.orientation, rel),
                "goal_vel_body": quat_rotate_inv(
                    self.state.orientation, self.target_vel - self.state.lin_vel
                ),
            },
        }
        return self._finalize_obs(raw)


def rendezvous_spec(domain) -> TaskSpec:
    return TaskSpec(
        task_id="rendezvous",
        domain=domain,
        max_episode_steps=1000,
        weights={
            "progress": 1.0,
            "velocity_match": 0.5,
            "spin_match": 0.5,
            "action_rate": -0.05,
            "fuel": -0.05,
        },
        params={
            "spawn_dist_min": 5.0,
            "spawn_dist_max": 10.0,
            "tumble_max": 0.2,
            "sigma_vel": 0.2,
            "sigma_spin": 0.1,
            "pos_tol": 1.0,
            "vel_tol": 0.1,
            "spin_tol": 0.05,
            "hold_steps": 10,
            "keepout_radius": 0.5,
        },
        success_definition="state_match_hold",
    )


class OrbitalEvasionBatch(CraftTaskBatch):
    """Dodge ballistic obstacles while staying near a reference point."""

    N_OBSTACLES = 3
    obs_spec = [
        ObsEntry("state", "position", 3, True),
        ObsEntry("state", "rotation6d", 6, True),
        ObsEntry("state", "lin_vel", 3, True),
        ObsEntry("state", "ang_vel", 3, True),
        ObsEntry("state", "gravity", 3, True),
        ObsEntry("state", "rel_obstacle_pos", 9, True),
        ObsEntry("state", "rel_obstacle_vel", 9, True),
        ObsEntry("proprioception", "twist", 6, True),
        ObsEntry("proprioception", "fuel_fraction", 1, True),
        ObsEntry("proprioception", "last_action", -1, False),
        ObsEntry("command", "ref_body", 3, True),
    ]

    def __init__(self, ctx):
        self.obstacle_pos = None
        super().__init__(ctx)

    def _reset_task_state(self, mask):
        k = self.N_OBSTACLES
        if self.obstacle_pos is None:
            self.obstacle_pos = np.zeros((self.n, k, 3))
            self.obstacle_vel = np.zeros((self.n, k, 3))
            self.ref_point = np.zeros((self.n, 3))
        p = self.spec.params
        self._spawn_free(mask, (0.0, 0.0, 0.0), (0.5, 0.5, 0.5), (0.02,) * 3, 0.02)
        self.ref_point[mask] = self.state.position[mask]
        for j in range(k):
            key = self._key(Stream.OBSTACLE, j, mask)
            direction = np.stack([normal(key, i) for i in range(3)], axis=-1)
            direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
            radius = p["spawn_dist_min"] + (
                p["spawn_dist_max"] - p["spawn_dist_min"]
            ) * uniform(key, 3)
            start = self.state.position[mask] + direction * radius[:, None]
            # aim at a point near the agent so every obstacle threatens it
            miss = np.stack([normal(key, 4 + i) for i in range(3)], axis=-1)
            aim = self.state.position[mask] + miss * p["aim_scatter"]
            speed = p["speed_min"] + (p["speed_max"] - p["speed_min"]) * uniform(key, 7)
            heading = aim - start
            heading /= np.linalg.norm(heading, axis=-1, keepdims=True)
            self.obstacle_pos[mask, j] = start
            self.obstacle_vel[mask, j] = heading * speed[:, None]

    def _advance(self, a):
        p = self.spec.params
        fuel_used = self._burn(a)
        dt_ctrl = self.dt * self.decimation
        self.obstacle_pos = self.obstacle_pos + self.obstacle_vel * dt_ctrl

        rel = self.obstacle_pos - self.state.position[:, None, :]
        dists = np.linalg.norm(rel, axis=-1)
        collided = np.any(dists < p["agent_radius"] + p["obstacle_radius"], axis=-1)

        ref_err = np.linalg.norm(self.state.position - self.ref_point, axis=-1)
        ref_term = exp_kernel(ref_err**2, p["sigma_ref"])
        rate = np.sum((a - self.prev_action) ** 2, axis=-1)

        terms = {
            "alive": np.ones(self.n),
            "reference": ref_term,
            "fuel": fuel_used,
            "action_rate": rate,
            "collision": collided.astype(float),
        }
        terminated = collided
        success = np.zeros(self.n, dtype=bool)
        return terms, terminated, success, {"out_of_bounds": np.zeros(self.n, dtype=bool)}

    def _truncation_success(self, truncated):
        # surviving to the horizon is the win condition
        return np.ones(self.n, dtype=bool)

    def _observe(self):
        rel = self.obstacle_pos - self.state.position[:, None, :]
        rel_vel = self.obstacle_vel - self.state.lin_vel[:, None, :]
        raw = {
            "state": {
                **self._common_obs(),
                "rel_obstacle_pos": rel.reshape(self.n, -1),
                "rel_obstacle_vel": rel_vel.reshape(self.n, -1),
            },
            "proprioception": self._proprio_obs(),
            "command": {
                "ref_body": quat_rotate_inv(
                    self.state.orientation, self.ref_point - self.state.position
                )
            },
        }
        return self._finalize_obs(raw)


def orbital_evasion_spec(domain) -> TaskSpec:
    return TaskSpec(
        task_id="orbital_evasion",
        domain=domain,
        max_episode_steps=1000,
        weights={
            "alive": 0.1,
            "reference": 0.5,
            "fuel": -0.05,
            "action_rate": -0.05,
            "collision": -25.0,
        },
        params={
            "spawn_dist_min": 8.0,
            "spawn_dist_max": 12.0,
            "aim_scatter": 0.5,
            "speed_min": 0.8,
            "speed_max": 1.5,
            "sigma_ref": 2.0,
            "agent_radius": 0.5,
            "obstacle_radius": 0.5,
        },
        success_definition="survive_horizon",
    )


class OrbitalWaypointBatch(CraftTaskBatch):
    """Waypoint chasing in 3D microgravity with spin stabilization."""

    obs_spec = [
        ObsEntry("state", "position", 3, True),
        ObsEntry("state", "rotation6d", 6, True),
        ObsEntry("state", "lin_vel", 3, True),
        ObsEntry("state", "ang_vel", 3, True),
        ObsEntry("state", "gravity", 3, True),
        ObsEntry("state", "waypoint", 3, True),
        ObsEntry("proprioception", "twist", 6, True),
        ObsEntry("proprioception", "fuel_fraction", 1, True),
        ObsEntry("proprioception", "last_action", -1, False),
        ObsEntry("command", "waypoint_body", 3, True),
    ]

    def __init__(self, ctx):
        self.waypoint = None
        super().__init__(ctx)

    def _reset_task_state(self, mask):
        if self.waypoint is None:
            self.waypoint = np.zeros((self.n, 3))
            self.wp_index = np.zeros(self.n, dtype=np.int64)
            self.reached = np.zeros(self.n, dtype=np.int64)
            self.prev_dist = np.zeros(self.n)
        self._spawn_free(mask, (0.0, 0.0, 0.0), (0.5, 0.5, 0.5), (0.02,) * 3, 0.02)
        self.wp_index[mask] = 0
        self.reached[mask] = 0
        self._spawn_waypoint(mask)

    def _spawn_waypoint(self, mask):
        half = self.spec.params["waypoint_box_half"]
        key = self._key(Stream.WAYPOINT, self.wp_index[mask], mask)
        wp = np.stack(
            [(uniform(key, i) * 2.0 - 1.0) * half for i in range(3)], axis=-1
        )
        self.waypoint[mask] = wp
        self.prev_dist[mask] = np.linalg.norm(
            self.waypoint[mask] - self.state.position[mask], axis=-1
        )

    def _advance(self, a):
        p = self.spec.params
        fuel_used = self._burn(a)

        delta = self.waypoint - self.state.position
        dist = np.linalg.norm(delta, axis=-1)
        progress = self.prev_dist - dist
        self.prev_dist = dist

        fwd = quat_rotate(self.state.orientation, np.broadcast_to([1.0, 0.0, 0.0], (self.n, 3)))
        safe = np.maximum(dist, 1e-9)
        heading = np.sum(fwd * delta, axis=-1) / safe

        stab = exp_kernel(
            np.sum(self.state.ang_vel**2, axis=-1), p["sigma_spin"]
        )
        rate = np.sum((a - self.prev_action) ** 2, axis=-1)

        speed = np.linalg.norm(self.state.lin_vel, axis=-1)
        reach_now = (dist <= p["waypoint_radius"]) & (speed <= p["hold_speed"])
        if reach_now.any():
            self.reached[reach_now] += 1
            self.wp_index[reach_now] += 1
            self._spawn_waypoint(reach_now)

        success = self.reached >= int(p["waypoints_to_win"])
        terminated = success.copy()
        terms = {
            "progress": progress,
            "heading": heading,
            "stabilization": stab,
            "action_rate": rate,
            "reach": reach_now.astype(float),
            "fuel": fuel_used,
        }
        return terms, terminated, success, {"out_of_bounds": np.zeros(self.n, dtype=bool)}

    def _observe(self):
        raw = {
            "state": {**self._common_obs(), "waypoint": self.waypoint},
            "proprioception": self._proprio_obs(),
            "command": {
                "waypoint_body": quat_rotate_inv(
                    self.state.orientation, self.waypoint - self.state.position
                )
            },
        }
        return self._finalize_obs(raw)


def orbital_waypoint_spec(domain) -> TaskSpec:
    return TaskSpec(
        task_id="orbital_waypoint_navigation",
        domain=domain,
        max_episode_steps=1000,
        weights={
            "progress": 1.0,
            "heading": 0.1,
            "stabilization": 0.2,
            "action_rate": -0.05,
            "reach": 10.0,
            "fuel": -0.05,
        },
        params={
            "waypoint_box_half": 4.0,
            "waypoint_radius": 0.3,
            "hold_speed": 0.15,
            "sigma_spin": 0.5,
            "waypoints_to_win": 3,
        },
        success_definition="waypoints3d_reached>=3",
    )
