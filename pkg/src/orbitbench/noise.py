"""Gradient and cellular noise driven by counter-based keys.

perlin2 is classic lattice gradient noise with a quintic fade and unit
gradients hashed per lattice corner from the key, so it vanishes exactly
at lattice points and is C2-smooth everywhere.  cellular2 places one
feature point per unit cell (uniform jitter) and scans the surrounding
5x5 block, which is enough to make F1 exact.  fbm2 stacks octaves with
geometric amplitude decay.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .rng import RngKey, key_bits, uniform

_SQRT2 = np.sqrt(2.0)
_TWO_PI = 2.0 * np.pi

# lane tags keep gradient, jitter, and id draws on disjoint sub-streams
_LANE_GRADIENT = 0x67
_LANE_FEATURE = 0x76
_LANE_CELL_ID = 0x1D


@dataclass(frozen=True)
class NoiseParams:
    """Octave stack description for fractional Brownian motion."""

    frequency: float  # cycles per meter of the base octave
    amplitude: float  # meters at the base octave
    octaves: int = 1
    lacunarity: float = 2.0
    gain: float = 0.5

    def validate(self) -> "NoiseParams":
        vals = (self.frequency, self.amplitude, self.lacunarity, self.gain)
        if not all(np.isfinite(v) for v in vals):
            raise InvalidParameterError(f"non-finite noise parameter in {self}")
        if self.octaves < 1:
            raise InvalidParameterError("octaves must be >= 1")
        if self.frequency <= 0.0:
            raise InvalidParameterError("frequency must be > 0")
        if self.amplitude < 0.0:
            raise InvalidParameterError("amplitude must be >= 0")
        if self.lacunarity <= 1.0:
            raise InvalidParameterError("lacunarity must be > 1")
        if not 0.0 < self.gain <= 1.0:
            raise InvalidParameterError("gain must be in (0, 1]")
        return self

    def amplitude_bound(self) -> float:
        """Upper bound on |fbm2| for these parameters (geometric series)."""
        return self.amplitude * sum(self.gain**i for i in range(self.octaves))


def _fade(t: np.ndarray) -> np.ndarray:
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


def _corner_gradient(key: RngKey, ix, iy):
    """Unit gradient for a lattice corner, hashed from the key."""
    bits = key_bits(key, _LANE_GRADIENT, ix, iy)
    theta = (bits >> np.uint64(11)) * float(2.0**-53) * _TWO_PI
    return np.cos(theta), np.sin(theta)


def perlin2(x, y, cell: float, key: RngKey):
    """Gradient noise in [-1, 1]; zero at lattice corners; pure in the key."""
    if not (np.isscalar(cell) and np.isfinite(cell)) or cell <= 0.0:
        raise InvalidParameterError(f"cell size must be a positive scalar, got {cell}")
    xs = np.asarray(x, dtype=float) / cell
    ys = np.asarray(y, dtype=float) / cell
    ix = np.floor(xs)
    iy = np.floor(ys)
    fx = xs - ix
    fy = ys - iy
    ix = ix.astype(np.int64)
    iy = iy.astype(np.int64)

    gx00, gy00 = _corner_gradient(key, ix, iy)
    gx10, gy10 = _corner_gradient(key, ix + 1, iy)
    gx01, gy01 = _corner_gradient(key, ix, iy + 1)
    gx11, gy11 = _corner_gradient(key, ix + 1, iy + 1)

    n00 = gx00 * fx + gy00 * fy
    n10 = gx10 * (fx - 1.0) + gy10 * fy
    n01 = gx01 * fx + gy01 * (fy - 1.0)
    n11 = gx11 * (fx - 1.0) + gy11 * (fy - 1.0)

    u = _fade(fx)
    v = _fade(fy)
    nx0 = n00 + u * (n10 - n00)
    nx1 = n01 + u * (n11 - n01)
    # unit gradients bound raw 2D Perlin by sqrt(2)/2; rescale to [-1, 1]
    return (nx0 + v * (nx1 - nx0)) * _SQRT2


def cellular2(x, y, cell: float, key: RngKey):
    """Voronoi F1/F2 distances (meters) and the id of the nearest feature.

    One feature point per unit cell, jittered uniformly; the 5x5 neighbor
    block bounds the search while keeping F1 exact.
    """
    if not (np.isscalar(cell) and np.isfinite(cell)) or cell <= 0.0:
        raise InvalidParameterError(f"cell size must be a positive scalar, got {cell}")
    xm = np.asarray(x, dtype=float)
    ym = np.asarray(y, dtype=float)
    bx = np.floor(xm / cell).astype(np.int64)
    by = np.floor(ym / cell).astype(np.int64)

    # distances in meters so a query at a feature point is exactly zero
    f1 = np.full(np.broadcast(xm, ym).shape, np.inf)
    f2 = np.full_like(f1, np.inf)
    best_id = np.zeros(f1.shape, dtype=np.uint64)
    for di in range(-2, 3):
        for dj in range(-2, 3):
            ci = bx + di
            cj = by + dj
            jx = uniform(key, _LANE_FEATURE, ci, cj, 0)
            jy = uniform(key, _LANE_FEATURE, ci, cj, 1)
            px = (ci + jx) * cell
            py = (cj + jy) * cell
            d = np.hypot(xm - px, ym - py)
            closer = d < f1
            f2 = np.where(closer, f1, np.minimum(f2, d))
            cid = key_bits(key, _LANE_CELL_ID, ci, cj)
            best_id = np.where(closer, cid, best_id)
            f1 = np.where(closer, d, f1)
    return f1, f2, best_id


def fbm2(x, y, params: NoiseParams, key: RngKey):
    """Octave-stacked gradient noise; |result| <= params.amplitude_bound()."""
    params.validate()
    base_cell = 1.0 / params.frequency
    total = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
    amp = params.amplitude
    cell = base_cell
    for i in range(params.octaves):
        total = total + amp * perlin2(x, y, cell, key.advance(i))
        amp *= params.gain
        cell /= params.lacunarity
    return total if total.shape else float(total)
