"""Shared task machinery: specs, reward breakdowns, vectorized batches.

A TaskBatch owns a contiguous block of environments as struct-of-arrays
state and steps them all at once with numpy.  Every random draw is keyed
by (seed, env, episode, stream, counter), so results do not depend on how
blocks are scheduled across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..actuation import (
    map_target_accel,
    map_thrusters,
    map_wheeled_twist,
    wheel_speeds_to_twist,
)
from ..dynamics import (
    BodyParams,
    DisturbanceModel,
    DomainPreset,
    DomainRandomization,
    RealizedDomain,
    RigidBodyState,
    randomize_domain,
    sample_disturbance,
)
from ..errors import InvalidParameterError
from ..rng import RngKey, Stream, uniform
from ..terrain import HeightfieldStack, TerrainBlueprint, generate_heightfield


@dataclass(frozen=True)
class TaskSpec:
    """Declarative description of one benchmark task configuration."""

    task_id: str
    domain: DomainPreset
    max_episode_steps: int
    weights: dict[str, float]  # negative weight = penalty term
    params: dict[str, float]  # thresholds, kernel widths, reset ranges
    success_definition: str

    def validate(self) -> "TaskSpec":
        if self.max_episode_steps < 1:
            raise InvalidParameterError("max_episode_steps must be >= 1")
        for k, v in self.params.items():
            if not np.isfinite(v):
                raise InvalidParameterError(f"task param {k} is not finite")
        return self

    def merged(self, weights=None, params=None, max_episode_steps=None) -> "TaskSpec":
        return TaskSpec(
            task_id=self.task_id,
            domain=self.domain,
            max_episode_steps=max_episode_steps or self.max_episode_steps,
            weights={**self.weights, **(weights or {})},
            params={**self.params, **(params or {})},
            success_definition=self.success_definition,
        )


class ObsEntry(NamedTuple):
    group: str
    name: str
    dim: int
    fixed: bool  # False when the size follows the robot morphology


@dataclass
class RewardBreakdown:
    """Named term values and their weights; total is the weighted sum."""

    terms: dict[str, np.ndarray]
    weights: dict[str, float]

    @property
    def total(self) -> np.ndarray:
        out = None
        for name, term in self.terms.items():
            piece = self.weights[name] * term
            out = piece if out is None else out + piece
        return out


@dataclass
class EpisodeStatus:
    terminated: np.ndarray
    truncated: np.ndarray
    success: np.ndarray


@dataclass
class StepSlice:
    """One block's step output; the engine concatenates these in order."""

    obs: dict
    reward: np.ndarray
    breakdown: RewardBreakdown
    status: EpisodeStatus
    info: dict


def exp_kernel(err_sq, sigma: float):
    """exp(-err^2 / sigma^2); in (0, 1], equal to 1 iff the error is zero."""
    return np.exp(-np.asarray(err_sq, dtype=float) / (sigma * sigma))


class VehicleMapper:
    """Resolved action mapping for one robot/action-model combination."""

    def __init__(self, robot: dict, model_id: str):
        self.model_id = model_id
        self.robot = robot
        if model_id == "wheeled_twist":
            self.group = "wheeled"
            self.dim = 2
        elif model_id == "wheeled_joint_vel":
            self.group = "wheeled"
            self.dim = 2
        elif model_id == "thruster_bank":
            self.group = "spacecraft"
            self.layout = robot["layout"]
            self.dim = self.layout.count
        elif model_id == "target_accel":
            self.group = "spacecraft"
            self.dim = 6
        else:
            raise InvalidParameterError(f"unknown action model {model_id!r}")

    def map_twist(self, a):
        if self.model_id == "wheeled_twist":
            return map_wheeled_twist(a, self.robot["v_max"], self.robot["omega_max"])
        wmax = self.robot["wheel_speed_max"]
        left = np.clip(a[..., 0], -1.0, 1.0) * wmax
        right = np.clip(a[..., 1], -1.0, 1.0) * wmax
        return wheel_speeds_to_twist(
            left, right, self.robot["wheel_radius"], self.robot["track"]
        )

    def map_wrench(self, a, fuel):
        if self.model_id == "thruster_bank":
            return map_thrusters(a, self.layout, fuel)
        force, torque = map_target_accel(
            a, self.robot["a_lin_max"], self.robot["a_ang_max"], self.robot["params"]
        )
        return force, torque, np.zeros(np.asarray(fuel).shape)


@dataclass
class BlockContext:
    """Everything a TaskBatch needs to own its slice of environments."""

    env_ids: np.ndarray  # global indices, contiguous
    base_seed: int
    spec: TaskSpec
    robot: dict
    mapper: VehicleMapper
    dt: float
    decimation: int
    dr: DomainRandomization
    disturbance: DisturbanceModel
    blueprint: TerrainBlueprint
    terrain_per_episode: bool = False
    terrain_shared: bool = False


class TaskBatch:
    """Vectorized environments of one task over a block of env indices."""

    needs_terrain = False
    obs_spec: list[ObsEntry] = []

    def __init__(self, ctx: BlockContext):
        self.ctx = ctx
        self.spec = ctx.spec.validate()
        self.n = len(ctx.env_ids)
        self.env_ids = np.asarray(ctx.env_ids, dtype=np.int64)
        self.base_seed = ctx.base_seed
        self.dt = ctx.dt
        self.decimation = ctx.decimation
        self.mapper = ctx.mapper
        self.params: BodyParams = ctx.robot["params"].validate()
        self.episode = np.zeros(self.n, dtype=np.int64)
        self.t = np.zeros(self.n, dtype=np.int64)
        self.prev_action = np.zeros((self.n, self.mapper.dim))
        self.last_twist = np.zeros((self.n, 2))
        self.stack: HeightfieldStack | None = None
        self.dom: RealizedDomain | None = None
        self.inertia_eff = np.broadcast_to(
            np.asarray(self.params.inertia_diag), (self.n, 3)
        ).copy()
        self.state = RigidBodyState.at_rest((self.n,), fuel=self.params.fuel_capacity)
        if self.needs_terrain:
            self._build_terrain()
        self.reset_all()

    # -- keys ---------------------------------------------------------------

    def _key(self, stream: Stream, counter=0, mask=None) -> RngKey:
        env = self.env_ids if mask is None else self.env_ids[mask]
        ep = self.episode if mask is None else self.episode[mask]
        return RngKey(self.base_seed, env, ep, int(stream), counter)

    def _draw(self, mask, lane, lo=0.0, hi=1.0, counter=0):
        u = uniform(self._key(Stream.RESET, counter, mask), lane)
        return lo + (hi - lo) * u

    # -- terrain ------------------------------------------------------------

    def _terrain_key_env(self, mask=None):
        env = self.env_ids if mask is None else self.env_ids[mask]
        return np.zeros_like(env) if self.ctx.terrain_shared else env

    def _build_terrain(self, mask=None):
        bp = self.ctx.blueprint
        idx = np.arange(self.n) if mask is None else np.flatnonzero(mask)
        env_keys = self._terrain_key_env(mask)
        episodes = (self.episode if self.ctx.terrain_per_episode else np.zeros(self.n, np.int64))
        fields = []
        for local, env_key in zip(idx, env_keys):
            key = RngKey(
                self.base_seed,
                int(env_key),
                int(episodes[local]),
                int(Stream.TERRAIN),
                0,
            )
            fields.append(generate_heightfield(bp, key))
        if mask is None:
            self.stack = HeightfieldStack(fields)
        else:
            for local, f in zip(idx, fields):
                self.stack.heights[local] = f.heights

    # -- reset --------------------------------------------------------------

    def reset_all(self):
        mask = np.ones(self.n, dtype=bool)
        self._reset_envs(mask, count_episode=False)

    def reseed(self, seed: int):
        """Rebase every stream on a new seed; episode indices restart at 0."""
        self.base_seed = seed
        self.episode[:] = 0
        if self.needs_terrain:
            self._build_terrain()
        self.reset_all()

    def soft_reset(self):
        """User-requested reset of all envs (episode indices advance)."""
        self.episode += 1
        if self.needs_terrain and self.ctx.terrain_per_episode:
            self._build_terrain()
        self.reset_all()

    def _reset_envs(self, mask, count_episode=True):
        if count_episode:
            self.episode[mask] += 1
            if self.needs_terrain and self.ctx.terrain_per_episode:
                self._build_terrain(mask)
        self.t[mask] = 0
        self.prev_action[mask] = 0.0
        self.last_twist[mask] = 0.0
        dom = randomize_domain(self.spec.domain, self.ctx.dr, self._key(Stream.DOMAIN, 0, mask))
        if self.dom is None:
            self.dom = dom
        else:
            self.dom.gravity[mask] = dom.gravity
            for name in ("friction_scale", "inertia_scale", "slip_lin", "slip_ang"):
                getattr(self.dom, name)[mask] = getattr(dom, name)
        self.inertia_eff = np.asarray(self.params.inertia_diag) * np.asarray(
            self.dom.inertia_scale
        )[:, None]
        self.state.fuel[mask] = self.params.fuel_capacity
        self._reset_task_state(mask)

    # -- hooks --------------------------------------------------------------

    def _reset_task_state(self, mask):
        raise NotImplementedError

    def _advance(self, actions):
        """Advance physics and return (terms, terminated, success, info)."""
        raise NotImplementedError

    def _truncation_success(self, truncated):
        return np.zeros(self.n, dtype=bool)

    def _observe(self) -> dict:
        raise NotImplementedError

    # -- step ---------------------------------------------------------------

    def step(self, actions: np.ndarray) -> StepSlice:
        actions = np.asarray(actions, dtype=float)
        clamped = np.any((actions < -1.0) | (actions > 1.0), axis=-1)
        a = np.clip(actions, -1.0, 1.0)

        terms, terminated, success, info = self._advance(a)
        self.t += 1
        truncated = (self.t >= self.spec.max_episode_steps) & ~terminated
        if truncated.any():
            success = success | (self._truncation_success(truncated) & truncated)

        breakdown = RewardBreakdown(terms=terms, weights=dict(self.spec.weights))
        reward = breakdown.total
        info["action_clamped"] = clamped

        obs = self._observe()
        ended = terminated | truncated
        if ended.any():
            finals = {}
            for local in np.flatnonzero(ended):
                finals[int(self.env_ids[local])] = {
                    "obs": {
                        g: {k: v[local].copy() for k, v in names.items()}
                        for g, names in obs.items()
                    },
                    "terminated": bool(terminated[local]),
                    "truncated": bool(truncated[local]),
                    "success": bool(success[local]),
                }
            info["final"] = finals
            self._reset_envs(ended)
            fresh = self._observe()
            for g, names in obs.items():
                for k in names:
                    names[k][ended] = fresh[g][k][ended]

        self.prev_action = a.copy()
        self.prev_action[ended] = 0.0

        status = EpisodeStatus(terminated=terminated, truncated=truncated, success=success)
        return StepSlice(obs=obs, reward=reward, breakdown=breakdown, status=status, info=info)

    # -- shared physics helpers ----------------------------------------------

    def _control_disturbance(self):
        return sample_disturbance(self.ctx.disturbance, self._key(Stream.DISTURBANCE, self.t))

    def _finalize_obs(self, raw: dict) -> dict:
        out = {}
        for group, names in raw.items():
            out[group] = {
                k: np.ascontiguousarray(v, dtype=np.float32).reshape(self.n, -1)
                for k, v in names.items()
            }
        return out

    def fuel_fraction(self):
        cap = self.params.fuel_capacity
        if cap <= 0.0:
            return np.ones(self.n)
        return self.state.fuel / cap
