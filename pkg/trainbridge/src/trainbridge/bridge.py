"""Gymnasium-style environments backed by the orbitbench engine.

Observation bundles flatten to a single Box in manifest order (state,
proprioception, command; entries in their declared order); the privileged
state group can be excluded to expose only sensor-equivalent data.  All
step/reset semantics delegate to the engine, which owns every source of
randomness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from orbitbench.runtime import EnvVectorConfig, VectorEnv, create_vector_env, emit_manifest

from .spaces import Box


@dataclass
class BridgeConfig:
    """Engine selection plus the bridge's observation policy."""

    task_id: str
    num_envs: int = 1
    seed: int = 0
    domain: str | None = None
    robot: str | None = None
    action_model: str | None = None
    include_privileged: bool = True
    engine: dict = field(default_factory=dict)  # extra EnvVectorConfig fields

    def to_engine_config(self) -> EnvVectorConfig:
        return EnvVectorConfig(
            task_id=self.task_id,
            num_envs=self.num_envs,
            global_seed=self.seed,
            domain=self.domain,
            robot=self.robot,
            action_model=self.action_model,
            **self.engine,
        )


def _flatten_layout(env: VectorEnv, include_privileged: bool):
    layout = []
    for group, names in env.group_layout().items():
        if group == "state" and not include_privileged:
            continue
        for name, dim, _fixed in names:
            layout.append((group, name, dim))
    return layout


class OrbitbenchVectorEnv:
    """Vectorized Gymnasium-convention environment over the engine handle.

    reset(seed) -> (obs, info); step(actions) -> (obs, reward, terminated,
    truncated, info).  Arrays are batched over the leading env axis.
    """

    metadata: dict = {"render_modes": []}
    render_mode = None

    def __init__(self, cfg: BridgeConfig):
        self.cfg = cfg
        self.engine = create_vector_env(cfg.to_engine_config())
        self.manifest = emit_manifest(self.engine)
        self.num_envs = cfg.num_envs
        self._layout = _flatten_layout(self.engine, cfg.include_privileged)
        obs_dim = sum(dim for _g, _n, dim in self._layout)
        self.single_observation_space = Box(-np.inf, np.inf, (obs_dim,), np.float32)
        self.single_action_space = Box(-1.0, 1.0, (self.engine.action_dim,), np.float32)
        self.observation_space = Box(
            -np.inf, np.inf, (cfg.num_envs, obs_dim), np.float32
        )
        self.action_space = Box(
            -1.0, 1.0, (cfg.num_envs, self.engine.action_dim), np.float32
        )

    def _flatten(self, bundle: dict) -> np.ndarray:
        return np.concatenate(
            [bundle[g][n] for g, n, _d in self._layout], axis=1, dtype=np.float32
        )

    def reset(self, seed: int | None = None, options: dict | None = None):
        bundle = self.engine.reset(seed)
        return self._flatten(bundle), {}

    def step(self, actions):
        batch = self.engine.step(np.asarray(actions, dtype=np.float64))
        info = {
            "success": batch.success,
            "terms": batch.terms,
            "final": batch.info.get("final", {}),
        }
        return (
            self._flatten(batch.obs),
            batch.reward,
            batch.terminated,
            batch.truncated,
            info,
        )

    def close(self):
        self.engine.close()


class OrbitbenchEnv:
    """Single-environment view with the plain (non-vector) Env signature."""

    metadata: dict = {"render_modes": []}
    render_mode = None
    spec = None

    def __init__(self, cfg: BridgeConfig):
        if cfg.num_envs != 1:
            raise ValueError("OrbitbenchEnv wraps exactly one environment")
        self._vec = OrbitbenchVectorEnv(cfg)
        self.observation_space = self._vec.single_observation_space
        self.action_space = self._vec.single_action_space

    def reset(self, *, seed: int | None = None, options: dict | None = None):
        obs, info = self._vec.reset(seed=seed, options=options)
        return obs[0], info

    def step(self, action):
        obs, reward, terminated, truncated, info = self._vec.step(
            np.asarray(action, dtype=np.float64)[None, :]
        )
        scalar_info = {"success": bool(info["success"][0])}
        return (
            obs[0],
            float(reward[0]),
            bool(terminated[0]),
            bool(truncated[0]),
            scalar_info,
        )

    def close(self):
        self._vec.close()


def make_vector_env(cfg: BridgeConfig) -> OrbitbenchVectorEnv:
    """Standard vectorized environment over the engine (Gymnasium semantics)."""
    return OrbitbenchVectorEnv(cfg)


def make_env(cfg: BridgeConfig) -> OrbitbenchEnv:
    return OrbitbenchEnv(cfg)
