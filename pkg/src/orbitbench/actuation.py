"""Action models: normalized agent actions to physical commands.

Every model maps a slice of the agent's [-1, 1] action box; models compose
into a single unified box for multi-part robots.  Thruster throttles use
the affine [-1, 1] -> [0, 1] rescaling so the composite action space stays
one normalized box.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import BodyParams
from .errors import InvalidActionError, InvalidParameterError
from .rng import RngKey, uniform_in


def _clip_actions(a, dim: int) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape[-1] != dim:
        raise InvalidActionError(f"expected action dim {dim}, got shape {a.shape}")
    return np.clip(a, -1.0, 1.0)


def map_wheeled_twist(a, v_max: float, omega_max: float):
    """(v, omega) from two normalized channels; out-of-range input clamps."""
    a = _clip_actions(a, 2)
    return a[..., 0] * v_max, a[..., 1] * omega_max


def twist_to_wheel_speeds(v, omega, wheel_radius: float, track: float):
    """Differential-drive inverse kinematics: twist to wheel rates."""
    if wheel_radius <= 0.0 or track <= 0.0:
        raise InvalidParameterError("wheel radius and track must be > 0")
    v = np.asarray(v, dtype=float)
    omega = np.asarray(omega, dtype=float)
    left = (v - omega * track / 2.0) / wheel_radius
    right = (v + omega * track / 2.0) / wheel_radius
    return left, right


def wheel_speeds_to_twist(left, right, wheel_radius: float, track: float):
    """Forward kinematics, the exact inverse of twist_to_wheel_speeds."""
    if wheel_radius <= 0.0 or track <= 0.0:
        raise InvalidParameterError("wheel radius and track must be > 0")
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    v = wheel_radius * (left + right) / 2.0
    omega = wheel_radius * (right - left) / track
    return v, omega


@dataclass(frozen=True)
class ThrusterLayout:
    """Body-frame thruster geometry with per-thruster limits."""

    positions: np.ndarray  # (k, 3) m
    directions: np.ndarray  # (k, 3) unit vectors
    max_thrust: np.ndarray  # (k,) N
    flow_rate: np.ndarray  # (k,) kg/s at full throttle

    def __post_init__(self):
        k = self.positions.shape[0]
        if self.directions.shape != (k, 3) or self.positions.shape != (k, 3):
            raise InvalidParameterError("positions and directions must be (k, 3)")
        norms = np.linalg.norm(self.directions, axis=-1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise InvalidParameterError("thruster directions must be unit length")
        if np.any(self.max_thrust <= 0.0) or np.any(self.flow_rate <= 0.0):
            raise InvalidParameterError("max_thrust and flow_rate must be > 0")

    @property
    def count(self) -> int:
        return self.positions.shape[0]


# Box-corner assignment for the default 8-thruster cubesat.  The axis
# directions were chosen so the eight unit wrenches positively span all six
# degrees of freedom (verified by linear programming in the test suite).
_CUBESAT_CORNERS = np.array([
    [+1, +1, +1], [-1, -1, -1],
    [+1, +1, -1], [-1, -1, +1],
    [+1, -1, +1], [-1, +1, -1],
    [+1, -1, -1], [-1, +1, +1],
], dtype=float)
_CUBESAT_DIRECTIONS = np.array([
    [+1, 0, 0], [+1, 0, 0],
    [+1, 0, 0], [-1, 0, 0],
    [0, +1, 0], [0, -1, 0],
    [0, 0, -1], [0, 0, +1],
], dtype=float)


def cubesat_layout(
    half_extents=(0.15, 0.15, 0.15),
    max_thrust: float = 25.0,
    flow_rate: float = 0.008,
    key: RngKey | None = None,
) -> ThrusterLayout:
    """Default 8-thruster corner bank; a key randomizes dims and thrust +-20%."""
    he = np.asarray(half_extents, dtype=float)
    thrust = float(max_thrust)
    if key is not None:
        he = he * np.array([uniform_in(key, 0.8, 1.2, i) for i in range(3)])
        thrust = thrust * float(uniform_in(key, 0.8, 1.2, 3))
    return ThrusterLayout(
        positions=_CUBESAT_CORNERS * he,
        directions=_CUBESAT_DIRECTIONS.copy(),
        max_thrust=np.full(8, thrust),
        flow_rate=np.full(8, float(flow_rate)),
    )


def map_thrusters(a, layout: ThrusterLayout, fuel):
    """Throttle the bank: returns (force, torque, flow), all body frame.

    Throttles are clamp((a + 1) / 2, 0, 1) and forced to zero once the tank
    is empty, which also zeroes the wrench and the flow.
    """
    a = np.asarray(a, dtype=float)
    if a.shape[-1] != layout.count:
        raise InvalidActionError(
            f"expected {layout.count} thruster channels, got shape {a.shape}"
        )
    throttle = np.clip((a + 1.0) * 0.5, 0.0, 1.0)
    has_fuel = np.asarray(fuel, dtype=float) > 0.0
    throttle = throttle * has_fuel[..., None]
    thrust = throttle * layout.max_thrust  # (..., k)
    force = thrust @ layout.directions  # (..., 3)
    lever = np.cross(layout.positions, layout.directions)  # (k, 3)
    torque = thrust @ lever
    flow = throttle @ layout.flow_rate
    return force, torque, flow


def map_target_accel(a, a_lin_max: float, a_ang_max: float, params: BodyParams):
    """Six acceleration channels to a body wrench via mass and inertia."""
    a = _clip_actions(a, 6)
    inertia = np.asarray(params.inertia_diag, dtype=float)
    force = params.mass * a_lin_max * a[..., 0:3]
    torque = inertia * (a_ang_max * a[..., 3:6])
    return force, torque


@dataclass(frozen=True)
class ActionModel:
    """Descriptor for one registered mapping; params are kind-specific."""

    kind: str  # wheeled_twist | wheeled_joint_vel | thruster_bank | target_accel
    dim: int
    params: dict = field(default_factory=dict)

    @property
    def lower(self) -> np.ndarray:
        return np.full(self.dim, -1.0)

    @property
    def upper(self) -> np.ndarray:
        return np.full(self.dim, 1.0)


@dataclass(frozen=True)
class CompositeModel:
    """Ordered concatenation of action models over one normalized box."""

    models: tuple[ActionModel, ...]
    slices: tuple[tuple[int, int], ...]
    total_dim: int

    def dispatch(self, a) -> list[np.ndarray]:
        a = np.asarray(a, dtype=float)
        if a.shape[-1] != self.total_dim:
            raise InvalidActionError(
                f"expected composite dim {self.total_dim}, got shape {a.shape}"
            )
        return [a[..., lo:hi] for lo, hi in self.slices]


def compose(models) -> CompositeModel:
    models = tuple(models)
    if not models:
        raise InvalidParameterError("cannot compose an empty model list")
    slices = []
    offset = 0
    for m in models:
        if m.dim < 1:
            raise InvalidParameterError(f"model {m.kind} has dim < 1")
        slices.append((offset, offset + m.dim))
        offset += m.dim
    return CompositeModel(models=models, slices=tuple(slices), total_dim=offset)
