"""Gymnasium-style bindings and a PPO baseline for the orbitbench engine."""

from .bridge import BridgeConfig, OrbitbenchEnv, OrbitbenchVectorEnv, make_env, make_vector_env
from .checker import ConformanceError, check_env
from .ppo import BaselineConfig, train_ppo
from .spaces import Box, GYMNASIUM_AVAILABLE

__all__ = [
    "BaselineConfig",
    "Box",
    "BridgeConfig",
    "ConformanceError",
    "GYMNASIUM_AVAILABLE",
    "OrbitbenchEnv",
    "OrbitbenchVectorEnv",
    "check_env",
    "make_env",
    "make_vector_env",
    "train_ppo",
]
