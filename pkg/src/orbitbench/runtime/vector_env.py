"""Vectorized environment handle with deterministic parallel stepping.

Environments are partitioned into fixed-size blocks (independent of the
worker count), each a struct-of-arrays TaskBatch.  Workers only decide
which thread executes which block; since every random draw is keyed and
blocks never share state, results are bitwise identical for any worker
count and across process invocations.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..dynamics import DisturbanceModel, DomainRandomization
from ..errors import InvalidActionError, InvalidParameterError
from ..tasks import BlockContext, EpisodeStatus, ObsEntry, VehicleMapper
from ..terrain import TerrainBlueprint
from .registry import Registry, get_registry

BLOCK_SIZE = 256

WORKERS_ENV_VAR = "ORBITBENCH_WORKERS"


@dataclass
class EnvVectorConfig:
    """Full description of a vectorized environment instance."""

    task_id: str
    domain: str | None = None
    num_envs: int = 1
    global_seed: int = 0
    robot: str | None = None
    action_model: str | None = None
    dt: float = 0.02
    decimation: int = 1
    max_episode_steps: int | None = None
    weights: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    dr: DomainRandomization = field(default_factory=DomainRandomization)
    disturbance: DisturbanceModel | None = None
    blueprint: TerrainBlueprint | None = None
    terrain_per_episode: bool = False
    terrain_shared: bool = False
    num_workers: int | None = None
    debug: bool = False

    def validate(self) -> "EnvVectorConfig":
        if self.num_envs < 1:
            raise InvalidParameterError("num_envs must be >= 1")
        if self.dt <= 0.0:
            raise InvalidParameterError("dt must be > 0")
        if self.decimation < 1:
            raise InvalidParameterError("decimation must be >= 1")
        return self


@dataclass
class StepBatch:
    """Merged per-step output across all environments."""

    obs: dict
    reward: np.ndarray
    terms: dict
    weights: dict
    terminated: np.ndarray
    truncated: np.ndarray
    success: np.ndarray
    info: dict


def _resolve_workers(cfg: EnvVectorConfig) -> int:
    if cfg.num_workers is not None:
        return max(1, cfg.num_workers)
    return max(1, int(os.environ.get(WORKERS_ENV_VAR, "1")))


class VectorEnv:
    """Handle over num_envs independent environments of one task."""

    def __init__(self, cfg: EnvVectorConfig, registry: Registry | None = None):
        cfg.validate()
        reg = registry or get_registry()
        task = reg.task(cfg.task_id)
        domain_name = cfg.domain or task.default_domain
        domain = reg.domain(domain_name)
        robot_id = cfg.robot or task.default_robot
        model_id = cfg.action_model or task.default_action_model
        reg.check_compatible(cfg.task_id, robot_id, model_id)
        robot = reg.robot(robot_id)

        self.cfg = cfg
        self.task_def = task
        self.domain_name = domain_name
        self.robot_id = robot_id
        self.model_id = model_id
        self.spec = task.spec_factory(domain).merged(
            weights=cfg.weights, params=cfg.params,
            max_episode_steps=cfg.max_episode_steps,
        )
        self.num_envs = cfg.num_envs
        self._workers = _resolve_workers(cfg)
        self._pool: ThreadPoolExecutor | None = None
        self._stepped = False

        mapper = VehicleMapper(robot.config, model_id)
        self.action_dim = mapper.dim
        self.obs_spec = [
            ObsEntry(e.group, e.name, mapper.dim if e.dim == -1 else e.dim, e.fixed)
            for e in task.batch_cls.obs_spec
        ]

        blueprint = cfg.blueprint or (
            task.blueprint_factory() if task.blueprint_factory else TerrainBlueprint()
        )
        disturbance = cfg.disturbance if cfg.disturbance is not None else task.disturbance

        self.blocks = []
        for lo in range(0, cfg.num_envs, BLOCK_SIZE):
            hi = min(lo + BLOCK_SIZE, cfg.num_envs)
            ctx = BlockContext(
                env_ids=np.arange(lo, hi, dtype=np.int64),
                base_seed=cfg.global_seed,
                spec=self.spec,
                robot=robot.config,
                mapper=VehicleMapper(robot.config, model_id),
                dt=cfg.dt,
                decimation=cfg.decimation,
                dr=cfg.dr,
                disturbance=disturbance,
                blueprint=blueprint,
                terrain_per_episode=cfg.terrain_per_episode,
                terrain_shared=cfg.terrain_shared,
            )
            self.blocks.append(task.batch_cls(ctx))

    # -- properties -----------------------------------------------------------

    @property
    def control_rate_hz(self) -> float:
        return 1.0 / (self.cfg.dt * self.cfg.decimation)

    def group_layout(self):
        """Ordered (group, [(name, dim, fixed), ...]) pairs of the obs bundle."""
        groups: dict[str, list] = {}
        for e in self.obs_spec:
            groups.setdefault(e.group, []).append((e.name, e.dim, e.fixed))
        return groups

    # -- lifecycle --------------------------------------------------------------

    def reset(self, seed: int | None = None) -> dict:
        if seed is not None:
            for b in self.blocks:
                b.reseed(seed)
        elif self._stepped:
            for b in self.blocks:
                b.soft_reset()
        self._stepped = False
        return self._merge_obs([b._observe() for b in self.blocks])

    def step(self, actions) -> StepBatch:
        actions = np.asarray(actions, dtype=np.float64)
        if actions.shape != (self.num_envs, self.action_dim):
            raise InvalidActionError(
                f"expected actions of shape {(self.num_envs, self.action_dim)}, "
                f"got {actions.shape}"
            )
        bad = ~np.isfinite(actions)
        if bad.any():
            envs = np.flatnonzero(bad.any(axis=1))[:8].tolist()
            raise InvalidActionError(f"non-finite action values for envs {envs}")

        slices = []
        lo = 0
        for b in self.blocks:
            slices.append(actions[lo:lo + b.n])
            lo += b.n

        if self._workers > 1 and len(self.blocks) > 1:
            pool = self._get_pool()
            futures = [pool.submit(b.step, s) for b, s in zip(self.blocks, slices)]
            results = [f.result() for f in futures]
        else:
            results = [b.step(s) for b, s in zip(self.blocks, slices)]

        self._stepped = True
        batch = self._merge(results)
        if self.cfg.debug:
            self._check_shapes(batch)
        return batch

    def close(self):
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False

    # -- merging -----------------------------------------------------------------

    def _get_pool(self) -> ThreadPoolExecutor:
        if self._pool is None:
            self._pool = ThreadPoolExecutor(max_workers=self._workers)
        return self._pool

    def _merge_obs(self, parts: list[dict]) -> dict:
        if len(parts) == 1:
            return parts[0]
        out: dict = {}
        for group, names in self.group_layout().items():
            out[group] = {
                name: np.concatenate([p[group][name] for p in parts], axis=0)
                for name, _dim, _fixed in names
            }
        return out

    def _merge(self, results) -> StepBatch:
        obs = self._merge_obs([r.obs for r in results])
        if len(results) == 1:
            r = results[0]
            reward, breakdown, status = r.reward, r.breakdown, r.status
            terms = breakdown.terms
            info = r.info
            info.setdefault("final", {})
        else:
            reward = np.concatenate([r.reward for r in results])
            term_names = list(results[0].breakdown.terms)
            terms = {
                k: np.concatenate([r.breakdown.terms[k] for r in results])
                for k in term_names
            }
            status = EpisodeStatus(
                terminated=np.concatenate([r.status.terminated for r in results]),
                truncated=np.concatenate([r.status.truncated for r in results]),
                success=np.concatenate([r.status.success for r in results]),
            )
            info = {
                "out_of_bounds": np.concatenate([r.info["out_of_bounds"] for r in results]),
                "action_clamped": np.concatenate([r.info["action_clamped"] for r in results]),
                "final": {},
            }
            for r in results:
                info["final"].update(r.info.get("final", {}))
        info["success"] = status.success
        return StepBatch(
            obs=obs,
            reward=reward,
            terms=terms,
            weights=dict(self.spec.weights),
            terminated=status.terminated,
            truncated=status.truncated,
            success=status.success,
            info=info,
        )

    def _check_shapes(self, batch: StepBatch):
        for group, names in self.group_layout().items():
            for name, dim, _fixed in names:
                arr = batch.obs[group][name]
                if arr.shape != (self.num_envs, dim) or arr.dtype != np.float32:
                    raise InvalidActionError(
                        f"observation {group}/{name} shape {arr.shape} dtype "
                        f"{arr.dtype} does not match the manifest ({self.num_envs}, {dim})"
                    )


def create_vector_env(cfg: EnvVectorConfig, registry: Registry | None = None) -> VectorEnv:
    """Registry-resolved construction of a vectorized environment."""
    return VectorEnv(cfg, registry)
