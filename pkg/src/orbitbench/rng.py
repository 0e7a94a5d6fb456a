"""Counter-based random number generation.

Every draw is a pure function of an explicit :class:`RngKey`; there is no
hidden generator state.  Keys split along (environment, episode, stream,
counter) axes, so any worker can evaluate any draw in any order and the
result never changes.  The mixing function is a splitmix64-style sponge:
each absorbed word goes through a full 64-bit avalanche, which keeps keys
that differ in a single field statistically independent.

All functions broadcast: any key field or extra word may be a numpy array.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np

_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_SPONGE_IV = 0x243F6A8885A308D3

_U64_TO_UNIT = float(2.0 ** -53)
_TWO_PI = 2.0 * np.pi


class Stream(IntEnum):
    """Named draw purposes; keeps independent subsystems off each other's keys."""

    TERRAIN = 1
    ROCKS = 2
    DOMAIN = 3
    RESET = 4
    DISTURBANCE = 5
    COMMAND = 6
    WAYPOINT = 7
    OBSTACLE = 8
    TUMBLE = 9
    POLICY = 10
    EMBODIMENT = 11


@dataclass(frozen=True)
class RngKey:
    """Full address of a random draw.

    Fields may be scalars or broadcastable integer arrays; draws then
    vectorize over the broadcast shape.
    """

    global_seed: int | np.ndarray
    env_index: int | np.ndarray = 0
    episode_index: int | np.ndarray = 0
    stream_id: int | np.ndarray = 0
    counter: int | np.ndarray = 0

    def advance(self, n: int | np.ndarray = 1) -> "RngKey":
        return replace(self, counter=self.counter + n)

    def with_counter(self, counter: int | np.ndarray) -> "RngKey":
        return replace(self, counter=counter)

    def stream(self, stream_id: int | np.ndarray) -> "RngKey":
        return replace(self, stream_id=stream_id, counter=0)

    def words(self) -> tuple:
        return (self.global_seed, self.env_index, self.episode_index,
                self.stream_id, self.counter)


def _as_u64(x) -> np.ndarray:
    a = np.asarray(x)
    if a.dtype == np.uint64:
        return a
    if a.dtype.kind in "iub":
        return a.astype(np.int64).astype(np.uint64)
    # Python ints above 2**63 arrive as uint64 via explicit cast
    return np.asarray(a, dtype=np.uint64)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
    return z ^ (z >> np.uint64(31))


def hash_u64(*words) -> np.ndarray:
    """Avalanche a word sequence into 64 uniform bits (broadcasting)."""
    with np.errstate(over="ignore"):
        acc = np.uint64(_SPONGE_IV)
        for w in words:
            acc = _mix64((acc + np.uint64(_GOLDEN)) ^ _as_u64(w))
        return _mix64(acc + np.uint64(_GOLDEN))


def key_bits(key: RngKey, *extra) -> np.ndarray:
    """64 uniform bits for a key plus optional extra lane words."""
    return hash_u64(*key.words(), *extra)


def uniform(key: RngKey, *extra) -> np.ndarray | float:
    """Uniform float64 in [0, 1), a pure function of the key."""
    return (key_bits(key, *extra) >> np.uint64(11)) * _U64_TO_UNIT


def uniform_in(key: RngKey, lo, hi, *extra):
    u = uniform(key, *extra)
    return lo + (hi - lo) * u


def normal(key: RngKey, *extra) -> np.ndarray | float:
    """Standard normal via Box-Muller on two sub-draws of the key."""
    b1 = key_bits(key, *extra, 0)
    b2 = key_bits(key, *extra, 1)
    # (0, 1] for the log argument so it never sees zero
    u1 = ((b1 >> np.uint64(11)) + np.uint64(1)) * _U64_TO_UNIT
    u2 = (b2 >> np.uint64(11)) * _U64_TO_UNIT
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(_TWO_PI * u2)


def _lane_key(key: RngKey) -> RngKey:
    """Append a trailing lane axis to every array-valued key field."""
    words = tuple(
        np.asarray(w)[..., None] if np.ndim(w) else w for w in key.words()
    )
    return RngKey(*words)


def uniform_lanes(key: RngKey, lanes: int, *extra) -> np.ndarray:
    """uniform(key, *extra, lane) for lane in range(lanes), in one wide call."""
    return uniform(_lane_key(key), *extra, np.arange(lanes))


def normal_lanes(key: RngKey, lanes: int, *extra) -> np.ndarray:
    """normal(key, *extra, lane) for lane in range(lanes), in one wide call."""
    return normal(_lane_key(key), *extra, np.arange(lanes))


def rng_uniform(key: RngKey) -> float:
    """Single uniform draw in [0, 1); advancing the counter yields the next."""
    return float(uniform(key))
