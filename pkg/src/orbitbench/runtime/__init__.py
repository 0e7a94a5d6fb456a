"""Registry, vectorized engine, manifests, loopback, episode logging."""

from .loopback import LoopbackTransport, Transport, run_loopback
from .manifest import Manifest, emit_manifest, read_manifest, verify_manifest, write_manifest
from .recorder import load_episode, record_episode
from .registry import Registry, default_registry, get_registry
from .vector_env import (
    BLOCK_SIZE,
    EnvVectorConfig,
    StepBatch,
    VectorEnv,
    create_vector_env,
)

__all__ = [
    "BLOCK_SIZE",
    "EnvVectorConfig",
    "LoopbackTransport",
    "Manifest",
    "Registry",
    "StepBatch",
    "Transport",
    "VectorEnv",
    "create_vector_env",
    "default_registry",
    "emit_manifest",
    "get_registry",
    "load_episode",
    "read_manifest",
    "record_episode",
    "run_loopback",
    "verify_manifest",
    "write_manifest",
]
