"""Environment conformance checks.

When gymnasium is installed its official checker runs; otherwise a bundled
checker enforces the same documented contract: space declarations, reset
and step signatures and return types, observation containment, and seeded
reset reproducibility.
"""

from __future__ import annotations

import numpy as np

from .spaces import GYMNASIUM_AVAILABLE


class ConformanceError(AssertionError):
    pass


def _require(cond, message):
    if not cond:
        raise ConformanceError(message)


def check_env(env) -> None:
    """Raise ConformanceError unless env honors the standard Env contract."""
    if GYMNASIUM_AVAILABLE:  # pragma: no cover - depends on host install
        import gymnasium

        if isinstance(env, gymnasium.Env):
            gymnasium.utils.env_checker.check_env(env, skip_render_check=True)
            return

    for attr in ("observation_space", "action_space", "reset", "step", "close"):
        _require(hasattr(env, attr), f"env lacks {attr}")
    obs_space = env.observation_space
    act_space = env.action_space
    for space, label in ((obs_space, "observation"), (act_space, "action")):
        for attr in ("shape", "dtype", "low", "high", "contains", "sample"):
            _require(hasattr(space, attr), f"{label} space lacks {attr}")

    out = env.reset(seed=123)
    _require(isinstance(out, tuple) and len(out) == 2, "reset must return (obs, info)")
    obs, info = out
    _require(isinstance(info, dict), "reset info must be a dict")
    _require(obs_space.contains(obs), "reset observation outside the space")

    obs2, _ = env.reset(seed=123)
    _require(
        np.array_equal(np.asarray(obs), np.asarray(obs2)),
        "reset with the same seed must reproduce the observation",
    )

    env.reset(seed=123)
    action = np.zeros(act_space.shape, dtype=act_space.dtype)
    _require(act_space.contains(action), "zero action outside the action space")
    out = env.step(action)
    _require(isinstance(out, tuple) and len(out) == 5,
             "step must return (obs, reward, terminated, truncated, info)")
    obs, reward, terminated, truncated, info = out
    _require(obs_space.contains(obs), "step observation outside the space")
    _require(isinstance(reward, (int, float)), "reward must be a python number")
    _require(isinstance(terminated, bool) and isinstance(truncated, bool),
             "terminated/truncated must be python bools")
    _require(isinstance(info, dict), "step info must be a dict")

    # seeded determinism through one transition
    env.reset(seed=7)
    a = act_space.sample()
    o1 = env.step(a)
    env.reset(seed=7)
    o2 = env.step(a)
    _require(np.array_equal(np.asarray(o1[0]), np.asarray(o2[0])),
             "seeded reset must make the next transition reproducible")
    _require(o1[1] == o2[1], "seeded reset must reproduce the reward")
