"""Interface manifests: the simulation's agent-facing contract as data.

A manifest is introspected from a live environment (never hand-written)
and serialized as canonical JSON -- sorted keys, compact separators,
shortest round-trip floats -- so re-emission is byte-stable and documents
can be diffed or shipped to a deployment target.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from .. import __version__
from ..errors import InvalidParameterError
from .vector_env import VectorEnv


@dataclass
class Manifest:
    schema_version: int
    engine_version: str
    task_id: str
    domain: str
    action: dict  # {"dim": int, "lower": [...], "upper": [...]}
    control_rate_hz: float
    observation_groups: dict  # group -> name -> {"shape": [d], "fixed": bool}
    success_definition: str

    def to_canonical_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"),
                          allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> "Manifest":
        data = json.loads(text)
        return cls(**data)

    @property
    def action_dim(self) -> int:
        return int(self.action["dim"])


def emit_manifest(env: VectorEnv) -> Manifest:
    """Introspect the live environment's interface."""
    groups = {}
    for group, names in env.group_layout().items():
        groups[group] = {
            name: {"shape": [int(dim)], "fixed": bool(fixed)}
            for name, dim, fixed in names
        }
    return Manifest(
        schema_version=1,
        engine_version=__version__,
        task_id=env.cfg.task_id,
        domain=env.domain_name,
        action={
            "dim": int(env.action_dim),
            "lower": [-1.0] * env.action_dim,
            "upper": [1.0] * env.action_dim,
        },
        control_rate_hz=env.control_rate_hz,
        observation_groups=groups,
        success_definition=env.spec.success_definition,
    )


def verify_manifest(env: VectorEnv, manifest: Manifest) -> None:
    """Round-trip check: the manifest must match the live environment."""
    fresh = emit_manifest(env)
    if fresh.to_canonical_json() != manifest.to_canonical_json():
        raise InvalidParameterError(
            "manifest does not match the live environment:\n"
            f"  manifest: {manifest.to_canonical_json()}\n"
            f"  live:     {fresh.to_canonical_json()}"
        )


def write_manifest(manifest: Manifest, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(manifest.to_canonical_json())
        fh.write("\n")


def read_manifest(path: str) -> Manifest:
    with open(path, encoding="utf-8") as fh:
        return Manifest.from_json(fh.read())
