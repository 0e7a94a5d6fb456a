"""Rigid-body and rover stepping, domain presets, domain randomization.

Spacecraft integrate with semi-implicit Euler (exact for constant
acceleration in velocity); rovers are kinematic with slip multipliers
standing in for wheel-soil interaction.  All state arrays broadcast over
leading batch dimensions, so one call steps any number of environments.

Conventions: forces in the world frame, torques and angular velocity in
the body frame, gravity along world -z.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParameterError
from .rng import RngKey, normal_lanes, uniform_in
from .rotations import quat_align_z, quat_from_yaw, quat_mul, quat_step_body, twist_z_of
from .terrain import Heightfield, HeightfieldStack


@dataclass(frozen=True)
class DomainPreset:
    """Gravity regime of a target environment."""

    name: str
    g_mean: float  # m/s^2
    g_jitter: float  # half-width of the uniform jitter, m/s^2

    def validate(self) -> "DomainPreset":
        if self.g_mean < 0.0 or self.g_jitter < 0.0:
            raise InvalidParameterError("gravity mean and jitter must be >= 0")
        if self.name == "orbit" and (self.g_mean != 0.0 or self.g_jitter != 0.0):
            raise InvalidParameterError("orbit preset is exactly zero gravity")
        return self


DOMAIN_PRESETS: dict[str, DomainPreset] = {
    "orbit": DomainPreset("orbit", 0.0, 0.0),
    "asteroid": DomainPreset("asteroid", 0.14, 0.14),
    "moon": DomainPreset("moon", 1.62, 0.01),
    "mars": DomainPreset("mars", 3.72, 0.01),
    "earth": DomainPreset("earth", 9.81, 0.03),
}


@dataclass(frozen=True)
class DomainRandomization:
    """Uniform multiplier ranges applied per episode."""

    friction_scale: tuple[float, float] = (0.9, 1.1)
    inertia_scale: tuple[float, float] = (0.9, 1.1)
    slip_lin: tuple[float, float] = (0.85, 1.0)
    slip_ang: tuple[float, float] = (0.85, 1.0)

    def validate(self) -> "DomainRandomization":
        for name in ("friction_scale", "inertia_scale", "slip_lin", "slip_ang"):
            lo, hi = getattr(self, name)
            if not (0.0 < lo <= hi):
                raise InvalidParameterError(f"{name} range must satisfy 0 < lo <= hi")
        for name in ("slip_lin", "slip_ang"):
            if getattr(self, name)[1] > 1.0:
                raise InvalidParameterError(f"{name} must stay within (0, 1]")
        return self


@dataclass
class RealizedDomain:
    """One episode's sampled physical parameters."""

    gravity: np.ndarray  # (..., 3), world frame
    friction_scale: np.ndarray
    inertia_scale: np.ndarray
    slip_lin: np.ndarray
    slip_ang: np.ndarray


@dataclass(frozen=True)
class BodyParams:
    mass: float
    inertia_diag: tuple[float, float, float]
    fuel_capacity: float = 0.0

    def validate(self) -> "BodyParams":
        if self.mass <= 0.0:
            raise InvalidParameterError("mass must be > 0")
        if any(i <= 0.0 for i in self.inertia_diag):
            raise InvalidParameterError("inertia components must be > 0")
        if self.fuel_capacity < 0.0:
            raise InvalidParameterError("fuel capacity must be >= 0")
        return self


@dataclass(frozen=True)
class DisturbanceModel:
    """White-noise wrench approximating unmodeled dynamics."""

    force_std: float = 0.0  # N per axis
    torque_std: float = 0.0  # N*m per axis

    def validate(self) -> "DisturbanceModel":
        if self.force_std < 0.0 or self.torque_std < 0.0:
            raise InvalidParameterError("disturbance stds must be >= 0")
        return self


@dataclass
class RigidBodyState:
    """Pose, twist, and fuel; arrays broadcast over batch dimensions."""

    position: np.ndarray  # (..., 3) m
    orientation: np.ndarray  # (..., 4) unit quaternion (w, x, y, z)
    lin_vel: np.ndarray  # (..., 3) m/s, world frame
    ang_vel: np.ndarray  # (..., 3) rad/s, body frame
    fuel: np.ndarray  # (...,) kg

    @classmethod
    def at_rest(cls, shape=(), fuel: float = 0.0) -> "RigidBodyState":
        q = np.zeros(shape + (4,))
        q[..., 0] = 1.0
        return cls(
            position=np.zeros(shape + (3,)),
            orientation=q,
            lin_vel=np.zeros(shape + (3,)),
            ang_vel=np.zeros(shape + (3,)),
            fuel=np.full(shape, float(fuel)),
        )

    def copy(self) -> "RigidBodyState":
        return RigidBodyState(
            self.position.copy(), self.orientation.copy(),
            self.lin_vel.copy(), self.ang_vel.copy(), self.fuel.copy(),
        )


def randomize_domain(
    preset: DomainPreset, dr: DomainRandomization, key: RngKey
) -> RealizedDomain:
    """Sample one realization; pure in the key, vectorizes over key fields."""
    preset.validate()
    dr.validate()
    g_mag = uniform_in(
        key, preset.g_mean - preset.g_jitter, preset.g_mean + preset.g_jitter, 0
    )
    g_mag = np.maximum(np.asarray(g_mag, dtype=float), 0.0)
    gravity = np.stack([np.zeros_like(g_mag), np.zeros_like(g_mag), -g_mag], axis=-1)
    draws = {
        name: np.asarray(uniform_in(key, *getattr(dr, name), i + 1), dtype=float)
        for i, name in enumerate(("friction_scale", "inertia_scale", "slip_lin", "slip_ang"))
    }
    return RealizedDomain(gravity=gravity, **draws)


def sample_disturbance(model: DisturbanceModel, key: RngKey):
    """Wrench with independent normal components; (force, torque) arrays."""
    model.validate()
    draws = normal_lanes(key, 6)
    force = model.force_std * draws[..., 0:3]
    torque = model.torque_std * draws[..., 3:6]
    return force, torque


def step_free_body(
    state: RigidBodyState,
    params: BodyParams,
    force: np.ndarray,
    torque: np.ndarray,
    gravity: np.ndarray,
    dt: float,
    inertia: np.ndarray | None = None,
) -> RigidBodyState:
    """Semi-implicit Euler step: force in world frame, torque in body frame.

    An explicit inertia array (e.g. per-environment randomized diagonals)
    overrides params.inertia_diag when given.
    """
    if dt <= 0.0:
        raise InvalidParameterError(f"dt must be > 0, got {dt}")
    params.validate()
    force = np.asarray(force, dtype=float)
    torque = np.asarray(torque, dtype=float)
    gravity = np.asarray(gravity, dtype=float)
    if inertia is None:
        inertia = np.asarray(params.inertia_diag, dtype=float)
    else:
        inertia = np.asarray(inertia, dtype=float)

    v_new = state.lin_vel + (force / params.mass + gravity) * dt
    x_new = state.position + v_new * dt

    omega = state.ang_vel
    gyro = np.cross(omega, inertia * omega)
    w_new = omega + (torque - gyro) / inertia * dt
    q_new = quat_step_body(state.orientation, w_new, dt)

    return RigidBodyState(
        position=x_new, orientation=q_new, lin_vel=v_new, ang_vel=w_new,
        fuel=state.fuel,
    )


def consume_fuel(state: RigidBodyState, flow, dt: float) -> RigidBodyState:
    """Deplete fuel at the given mass flow; clamps at zero."""
    flow = np.asarray(flow, dtype=float)
    if np.any(flow < 0.0):
        raise InvalidParameterError("fuel flow must be >= 0")
    if dt <= 0.0:
        raise InvalidParameterError(f"dt must be > 0, got {dt}")
    return replace(state, fuel=np.maximum(state.fuel - flow * dt, 0.0))


def _terrain_lookup(hf, x, y):
    if isinstance(hf, HeightfieldStack):
        env = np.arange(hf.heights.shape[0]) if np.asarray(x).ndim else 0
        return hf.sample(env, x, y)
    assert isinstance(hf, Heightfield)
    from .terrain import _bilinear

    env = np.zeros(np.asarray(x).shape, dtype=np.intp)
    return _bilinear(hf.heights[None, ...], hf.cell_size_x, hf.cell_size_y, env, x, y)


def step_rover_on_terrain(
    state: RigidBodyState,
    twist_cmd,
    hf,
    dom: RealizedDomain,
    disturbance,
    dt: float,
    params: BodyParams | None = None,
):
    """Kinematic skid-steer step with slip; the base never leaves the surface.

    twist_cmd is (v, omega); disturbance is a (force, torque) pair whose
    planar force induces a drift of force/m * dt^2.  Returns the new state,
    the realized body twist (v_eff, omega_eff), and an out-of-bounds flag
    raised when the commanded motion had to be clamped to the extent.
    """
    if dt <= 0.0:
        raise InvalidParameterError(f"dt must be > 0, got {dt}")
    v_cmd, w_cmd = twist_cmd
    v_eff = np.asarray(v_cmd, dtype=float) * dom.slip_lin
    w_eff = np.asarray(w_cmd, dtype=float) * dom.slip_ang

    # twist_z recovers the stored heading exactly under terrain tilt;
    # extracting the projected body-x yaw instead can cancel the commanded
    # turn on steep slopes and pin the heading
    yaw_new = twist_z_of(state.orientation) + w_eff * dt
    mass = params.mass if params is not None else 1.0
    dist_force = np.asarray(disturbance[0], dtype=float)
    drift = dist_force[..., :2] / mass * dt * dt

    x_new = state.position[..., 0] + np.cos(yaw_new) * v_eff * dt + drift[..., 0]
    y_new = state.position[..., 1] + np.sin(yaw_new) * v_eff * dt + drift[..., 1]

    # clamp to the extent first, then sample once at the final position
    x_cl = np.clip(x_new, 0.0, hf.extent_x)
    y_cl = np.clip(y_new, 0.0, hf.extent_y)
    oob = (x_cl != x_new) | (y_cl != y_new)
    h, normal_vec = _terrain_lookup(hf, x_cl, y_cl)

    pos_new = np.stack([x_cl, y_cl, h], axis=-1)
    q_new = quat_mul(quat_align_z(normal_vec), quat_from_yaw(yaw_new))
    lin_vel = (pos_new - state.position) / dt
    ang_vel = np.stack([np.zeros_like(w_eff), np.zeros_like(w_eff), w_eff], axis=-1)

    new_state = RigidBodyState(
        position=pos_new, orientation=q_new, lin_vel=lin_vel, ang_vel=ang_vel,
        fuel=state.fuel,
    )
    return new_state, (v_eff, w_eff), oob
