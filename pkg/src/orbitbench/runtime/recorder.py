"""Episode logging as JSON Lines, one record per step per environment."""

from __future__ import annotations

import json

import numpy as np

from ..errors import OrbitbenchError
from .vector_env import VectorEnv


def _obs_to_lists(obs: dict, env: int) -> dict:
    return {
        group: {name: [float(v) for v in arr[env]] for name, arr in names.items()}
        for group, names in obs.items()
    }


def record_episode(env: VectorEnv, policy, path: str, seed: int | None = None) -> int:
    """Run one episode per environment, logging every step to JSONL.

    Returns the number of episodes written (= num_envs).  Steps that occur
    after an environment's first episode has ended are not logged.
    """
    obs = env.reset(seed)
    active = np.ones(env.num_envs, dtype=bool)
    t = 0
    try:
        fh = open(path, "w", encoding="utf-8")
    except OSError as exc:
        raise OrbitbenchError(f"cannot open episode log {path!r}: {exc}") from exc
    with fh:
        while active.any():
            actions = np.asarray(policy(obs, t))
            batch = env.step(actions)
            for i in np.flatnonzero(active):
                record = {
                    "env": int(i),
                    "t": t,
                    "action": [float(a) for a in actions[i]],
                    "obs": _obs_to_lists(obs, int(i)),
                    "reward": float(batch.reward[i]),
                    "terms": {k: float(v[i]) for k, v in batch.terms.items()},
                    "flags": {
                        "terminated": bool(batch.terminated[i]),
                        "truncated": bool(batch.truncated[i]),
                        "success": bool(batch.success[i]),
                    },
                }
                fh.write(json.dumps(record, separators=(",", ":")))
                fh.write("\n")
            ended = batch.terminated | batch.truncated
            active &= ~ended
            obs = batch.obs
            t += 1
    return env.num_envs


def load_episode(path: str) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
