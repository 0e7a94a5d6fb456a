"""Hardware-interface contract and its in-process loopback reference.

The transport contract mirrors a minimal deployment link: blocking
send(command bytes) / receive(observation bytes per group), both little-
endian float32, paced at the control rate.  The loopback transport echoes
the simulator itself, so a policy driven through it must reproduce the
direct simulation bit for bit.
"""

from __future__ import annotations

import time
from typing import Protocol

import numpy as np

from ..errors import InvalidActionError, TransportDeadlineError
from .manifest import Manifest
from .vector_env import VectorEnv


class Transport(Protocol):
    """Blocking byte-level link to a robot (or a simulator standing in)."""

    def send(self, command: bytes) -> None: ...

    def receive(self) -> dict[str, bytes]: ...


def _encode_group(obs: dict, group: str, names) -> bytes:
    parts = [np.ascontiguousarray(obs[group][name][0], dtype="<f4") for name, _d, _f in names]
    return b"".join(p.tobytes() for p in parts)


def _decode_groups(payload: dict[str, bytes], manifest: Manifest) -> dict:
    """Rebuild the nested observation bundle (batch of one) from bytes."""
    out: dict = {}
    for group, names in manifest.observation_groups.items():
        buf = np.frombuffer(payload[group], dtype="<f4")
        out[group] = {}
        offset = 0
        for name, meta in names.items():
            dim = int(meta["shape"][0])
            out[group][name] = buf[offset:offset + dim].reshape(1, dim)
            offset += dim
        if offset != buf.size:
            raise InvalidActionError(
                f"group {group!r} payload has {buf.size} floats, expected {offset}"
            )
    return out


class LoopbackTransport:
    """Reference transport that routes bytes straight into a simulator."""

    def __init__(self, env: VectorEnv):
        if env.num_envs != 1:
            raise InvalidActionError("loopback transport drives a single environment")
        self.env = env
        self.action_dim = env.action_dim
        self._layout = env.group_layout()
        self._obs = env.reset()

    def receive(self) -> dict[str, bytes]:
        return {
            group: _encode_group(self._obs, group, names)
            for group, names in self._layout.items()
        }

    def send(self, command: bytes) -> None:
        action = np.frombuffer(command, dtype="<f4").astype(np.float64)
        if action.size != self.action_dim:
            raise InvalidActionError(
                f"command carries {action.size} channels, expected {self.action_dim}"
            )
        batch = self.env.step(action.reshape(1, -1))
        self._obs = batch.obs


def run_loopback(
    manifest: Manifest,
    policy,
    transport,
    steps: int,
    pace: bool = True,
):
    """Drive a policy through a transport at the manifest's control rate.

    Returns the transcript: one record per step with the raw observation
    payload and the command bytes that were sent.
    """
    declared = getattr(transport, "action_dim", None)
    if declared is not None and declared != manifest.action_dim:
        raise InvalidActionError(
            f"manifest action dim {manifest.action_dim} does not match the "
            f"transport's {declared}; refusing to start"
        )
    lower = np.asarray(manifest.action["lower"])
    upper = np.asarray(manifest.action["upper"])
    period = 1.0 / manifest.control_rate_hz
    transcript = []
    t0 = time.monotonic()
    for i in range(steps):
        try:
            payload = transport.receive()
        except TransportDeadlineError as exc:
            raise TransportDeadlineError(f"receive timed out at step {i}: {exc}") from exc
        obs = _decode_groups(payload, manifest)
        action = np.asarray(policy(obs, i), dtype=np.float64).reshape(-1)
        if action.size != manifest.action_dim:
            raise InvalidActionError(
                f"policy produced {action.size} channels, manifest says "
                f"{manifest.action_dim}"
            )
        action = np.clip(action, lower, upper)
        command = np.ascontiguousarray(action, dtype="<f4").tobytes()
        try:
            transport.send(command)
        except TransportDeadlineError as exc:
            raise TransportDeadlineError(f"send timed out at step {i}: {exc}") from exc
        transcript.append({"step": i, "observation": payload, "command": command})
        if pace:
            deadline = t0 + (i + 1) * period
            while True:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    break
                time.sleep(remaining)
    return transcript
