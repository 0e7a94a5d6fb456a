"""Box space shim matching the Gymnasium contract.

The real gymnasium package takes precedence when importable; this fallback
implements the same attributes and methods the bridge and the conformance
checker rely on (shape, dtype, low, high, contains, sample, seed).
"""

from __future__ import annotations

import numpy as np

try:  # pragma: no cover - exercised only where gymnasium is installed
    from gymnasium.spaces import Box  # type: ignore

    GYMNASIUM_AVAILABLE = True
except ImportError:
    GYMNASIUM_AVAILABLE = False

    class Box:
        """Bounded n-dimensional box with the gymnasium.spaces.Box API."""

        def __init__(self, low, high, shape=None, dtype=np.float32, seed=None):
            self.dtype = np.dtype(dtype)
            if shape is None:
                shape = np.broadcast(np.asarray(low), np.asarray(high)).shape
            self.shape = tuple(shape)
            self.low = np.broadcast_to(np.asarray(low, dtype=self.dtype), self.shape).copy()
            self.high = np.broadcast_to(np.asarray(high, dtype=self.dtype), self.shape).copy()
            self._rng = np.random.default_rng(seed)

        def seed(self, seed=None):
            self._rng = np.random.default_rng(seed)
            return [seed]

        def contains(self, x) -> bool:
            x = np.asarray(x)
            if x.shape != self.shape:
                return False
            if not np.can_cast(x.dtype, self.dtype):
                return False
            return bool(np.all(x >= self.low) and np.all(x <= self.high))

        def sample(self):
            finite = np.isfinite(self.low) & np.isfinite(self.high)
            out = np.where(
                finite,
                self._rng.uniform(
                    np.where(finite, self.low, 0.0),
                    np.where(finite, self.high, 1.0),
                ),
                self._rng.normal(size=self.shape),
            )
            return out.astype(self.dtype)

        def __contains__(self, x) -> bool:
            return self.contains(x)

        def __repr__(self) -> str:
            return f"Box({self.low.min()}, {self.high.max()}, {self.shape}, {self.dtype})"
