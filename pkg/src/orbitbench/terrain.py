"""On-demand procedural terrain: layered noise, craters, and rock fields.

A heightfield starts flat, gets displaced by a low-frequency macro noise
stack, then by a higher-frequency meso stack, and finally receives a set
of crater profiles (cosine bowl, quarter-cosine rim falloff).  Everything
is a pure function of (blueprint, key), so each parallel environment can
own a unique world that is reproducible from its seed alone.
"""

from __future__ import annotations

import csv as _csv
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, OutOfBoundsError
from .noise import NoiseParams, fbm2
from .rng import RngKey, uniform

ORBH_MAGIC = b"ORBH"

# counter offset separating the meso octave keys from the macro ones
_MESO_COUNTER_OFFSET = 1 << 32
# lane tags for crater and rock draws
_LANE_CRATER = 0xC2
_LANE_ROCK = 0x2C

_ROCK_ATTEMPTS = 30


@dataclass(frozen=True)
class TerrainBlueprint:
    """Parametric family of terrains; a key picks one member."""

    rows: int = 65
    cols: int = 65
    extent_x: float = 8.0
    extent_y: float = 8.0
    macro: NoiseParams = field(
        default_factory=lambda: NoiseParams(frequency=0.05, amplitude=0.4, octaves=2)
    )
    meso: NoiseParams = field(
        default_factory=lambda: NoiseParams(frequency=0.4, amplitude=0.05, octaves=3)
    )
    crater_density: float = 0.03  # craters per square meter
    crater_radius_range: tuple[float, float] = (0.4, 1.2)
    crater_depth_ratio: float = 0.25  # depth / radius
    rim_height_ratio: float = 0.4  # rim height / depth
    rim_width_ratio: float = 0.35  # rim width / radius
    rock_density: float = 0.2  # rocks per square meter
    rock_scale_range: tuple[float, float] = (0.05, 0.25)
    rock_min_separation: float = 0.5

    def validate(self) -> "TerrainBlueprint":
        if self.rows < 2 or self.cols < 2:
            raise InvalidParameterError("grid must be at least 2x2")
        if self.extent_x <= 0.0 or self.extent_y <= 0.0:
            raise InvalidParameterError("extents must be positive")
        self.macro.validate()
        self.meso.validate()
        rmin, rmax = self.crater_radius_range
        if not 0.0 < rmin <= rmax:
            raise InvalidParameterError("crater radius range must satisfy 0 < min <= max")
        for name in ("crater_depth_ratio", "rim_height_ratio", "rim_width_ratio"):
            if getattr(self, name) <= 0.0:
                raise InvalidParameterError(f"{name} must be > 0")
        if self.crater_density < 0.0 or self.rock_density < 0.0:
            raise InvalidParameterError("densities must be >= 0")
        smin, smax = self.rock_scale_range
        if not 0.0 < smin <= smax:
            raise InvalidParameterError("rock scale range must satisfy 0 < min <= max")
        if self.rock_min_separation < 0.0:
            raise InvalidParameterError("rock_min_separation must be >= 0")
        return self

    @property
    def cell_size_x(self) -> float:
        return self.extent_x / (self.cols - 1)

    @property
    def cell_size_y(self) -> float:
        return self.extent_y / (self.rows - 1)

    @property
    def area(self) -> float:
        return self.extent_x * self.extent_y


@dataclass
class Heightfield:
    """Regular elevation grid; node (r, c) sits at (c*cell_x, r*cell_y)."""

    rows: int
    cols: int
    cell_size_x: float
    cell_size_y: float
    heights: np.ndarray  # (rows, cols) float64, meters

    @property
    def extent_x(self) -> float:
        return (self.cols - 1) * self.cell_size_x

    @property
    def extent_y(self) -> float:
        return (self.rows - 1) * self.cell_size_y

    def node_xy(self):
        x = np.arange(self.cols) * self.cell_size_x
        y = np.arange(self.rows) * self.cell_size_y
        return np.meshgrid(x, y)


@dataclass(frozen=True)
class Crater:
    cx: float
    cy: float
    radius: float
    depth: float
    rim_height: float
    rim_width: float


@dataclass(frozen=True)
class RockInstance:
    x: float
    y: float
    z: float
    scale: float
    yaw: float


@dataclass
class RockField:
    rocks: list[RockInstance]
    target_count: int

    @property
    def placed_count(self) -> int:
        return len(self.rocks)


def crater_profile(d, radius: float, depth: float, rim_height: float, rim_width: float):
    """Height change at distance d from a crater center.

    Cosine bowl from -depth at the center to +rim_height at the radius,
    then a quarter-cosine falloff to zero over rim_width; zero beyond.
    """
    for name, v in (("radius", radius), ("depth", depth),
                    ("rim_height", rim_height), ("rim_width", rim_width)):
        if v <= 0.0 or not np.isfinite(v):
            raise InvalidParameterError(f"crater {name} must be > 0, got {v}")
    d = np.asarray(d, dtype=float)
    bowl = -depth + (depth + rim_height) * 0.5 * (1.0 - np.cos(np.pi * np.minimum(d / radius, 1.0)))
    rim_t = np.clip((d - radius) / rim_width, 0.0, 1.0)
    rim = rim_height * np.cos(0.5 * np.pi * rim_t)
    out = np.where(d <= radius, bowl, np.where(d <= radius + rim_width, rim, 0.0))
    return out if out.shape else float(out)


def crater_field(bp: TerrainBlueprint, key: RngKey) -> list[Crater]:
    """The crater set a blueprint/key pair realizes (same draws as generation)."""
    bp.validate()
    count = int(round(bp.crater_density * bp.area))
    rmin, rmax = bp.crater_radius_range
    craters = []
    for i in range(count):
        cx = float(uniform(key, _LANE_CRATER, i, 0)) * bp.extent_x
        cy = float(uniform(key, _LANE_CRATER, i, 1)) * bp.extent_y
        # log-uniform radius over the configured range
        u = float(uniform(key, _LANE_CRATER, i, 2))
        radius = float(np.exp(np.log(rmin) + u * (np.log(rmax) - np.log(rmin))))
        depth = bp.crater_depth_ratio * radius
        craters.append(
            Crater(
                cx=cx,
                cy=cy,
                radius=radius,
                depth=depth,
                rim_height=bp.rim_height_ratio * depth,
                rim_width=bp.rim_width_ratio * radius,
            )
        )
    return craters


def generate_heightfield(bp: TerrainBlueprint, key: RngKey) -> Heightfield:
    """Macro fBm + meso fBm + crater profiles on the blueprint grid."""
    bp.validate()
    x = np.arange(bp.cols) * bp.cell_size_x
    y = np.arange(bp.rows) * bp.cell_size_y
    gx, gy = np.meshgrid(x, y)

    heights = np.zeros((bp.rows, bp.cols))
    if bp.macro.amplitude > 0.0:
        heights += fbm2(gx, gy, bp.macro, key)
    if bp.meso.amplitude > 0.0:
        heights += fbm2(gx, gy, bp.meso, key.advance(_MESO_COUNTER_OFFSET))
    for crater in crater_field(bp, key):
        d = np.hypot(gx - crater.cx, gy - crater.cy)
        heights += crater_profile(
            d, crater.radius, crater.depth, crater.rim_height, crater.rim_width
        )
    return Heightfield(
        rows=bp.rows,
        cols=bp.cols,
        cell_size_x=bp.cell_size_x,
        cell_size_y=bp.cell_size_y,
        heights=heights,
    )


def sample_height(hf: Heightfield, x, y):
    """Bilinear height and unit surface normal at (x, y) inside the extent."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > hf.extent_x) or np.any(ya < 0.0) or np.any(ya > hf.extent_y):
        raise OutOfBoundsError(
            f"query outside extent [0, {hf.extent_x}] x [0, {hf.extent_y}]"
        )
    h, normal = _bilinear(hf.heights[None, ...], hf.cell_size_x, hf.cell_size_y,
                          np.zeros(xa.shape, dtype=np.intp), xa, ya)
    if h.shape == ():
        return float(h), normal
    return h, normal


def _bilinear(stack: np.ndarray, csx: float, csy: float, env, x, y):
    """Shared bilinear sampler over a (n, rows, cols) stack of heightfields."""
    _, rows, cols = stack.shape
    cx = x / csx
    cy = y / csy
    c0 = np.clip(np.floor(cx).astype(np.intp), 0, cols - 2)
    r0 = np.clip(np.floor(cy).astype(np.intp), 0, rows - 2)
    fx = cx - c0
    fy = cy - r0

    flat = stack.reshape(-1)
    base = (env * rows + r0) * cols + c0
    h00 = flat[base]
    h01 = flat[base + 1]
    h10 = flat[base + cols]
    h11 = flat[base + cols + 1]

    # tensor-product weights reproduce node heights exactly at fx, fy in {0, 1}
    hx0 = (1.0 - fx) * h00 + fx * h01
    hx1 = (1.0 - fx) * h10 + fx * h11
    h = (1.0 - fy) * hx0 + fy * hx1

    dhdx = ((h01 - h00) + fy * ((h11 - h10) - (h01 - h00))) / csx
    dhdy = ((h10 - h00) + fx * ((h11 - h01) - (h10 - h00))) / csy
    inv = 1.0 / np.sqrt(dhdx * dhdx + dhdy * dhdy + 1.0)
    normal = np.stack([-dhdx * inv, -dhdy * inv, inv], axis=-1)
    return h, normal


class HeightfieldStack:
    """Per-environment heightfields sharing one grid shape, sampled in batch."""

    def __init__(self, fields: list[Heightfield]):
        first = fields[0]
        self.rows = first.rows
        self.cols = first.cols
        self.cell_size_x = first.cell_size_x
        self.cell_size_y = first.cell_size_y
        self.heights = np.stack([f.heights for f in fields])

    @property
    def extent_x(self) -> float:
        return (self.cols - 1) * self.cell_size_x

    @property
    def extent_y(self) -> float:
        return (self.rows - 1) * self.cell_size_y

    def sample(self, env, x, y):
        return _bilinear(self.heights, self.cell_size_x, self.cell_size_y,
                         np.asarray(env, dtype=np.intp), x, y)

    def field(self, i: int) -> Heightfield:
        return Heightfield(self.rows, self.cols, self.cell_size_x,
                           self.cell_size_y, self.heights[i])


def scatter_rocks(bp: TerrainBlueprint, hf: Heightfield, key: RngKey) -> RockField:
    """Rejection-sampled rock placement honoring the minimum separation."""
    bp.validate()
    target = int(round(bp.rock_density * bp.area))
    smin, smax = bp.rock_scale_range
    placed_x: list[float] = []
    placed_y: list[float] = []
    rocks: list[RockInstance] = []
    min_sep2 = bp.rock_min_separation**2
    for i in range(target):
        for attempt in range(_ROCK_ATTEMPTS):
            x = float(uniform(key, _LANE_ROCK, i, attempt, 0)) * bp.extent_x
            y = float(uniform(key, _LANE_ROCK, i, attempt, 1)) * bp.extent_y
            if placed_x:
                dx = np.asarray(placed_x) - x
                dy = np.asarray(placed_y) - y
                if float(np.min(dx * dx + dy * dy)) < min_sep2:
                    continue
            scale = smin + (smax - smin) * float(uniform(key, _LANE_ROCK, i, attempt, 2))
            yaw = 2.0 * np.pi * float(uniform(key, _LANE_ROCK, i, attempt, 3))
            z, _ = sample_height(hf, x, y)
            rocks.append(RockInstance(x=x, y=y, z=float(z), scale=scale, yaw=yaw))
            placed_x.append(x)
            placed_y.append(y)
            break
    return RockField(rocks=rocks, target_count=target)


def write_orbh(hf: Heightfield, path: str) -> None:
    """Binary export: magic, u32 rows/cols, f32 cell sizes, f32 heights row-major."""
    with open(path, "wb") as fh:
        fh.write(ORBH_MAGIC)
        fh.write(struct.pack("<II", hf.rows, hf.cols))
        fh.write(struct.pack("<ff", hf.cell_size_x, hf.cell_size_y))
        fh.write(hf.heights.astype("<f4").tobytes(order="C"))


def read_orbh(path: str) -> Heightfield:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != ORBH_MAGIC:
            raise InvalidParameterError(f"bad magic {magic!r}, expected {ORBH_MAGIC!r}")
        rows, cols = struct.unpack("<II", fh.read(8))
        csx, csy = struct.unpack("<ff", fh.read(8))
        data = np.frombuffer(fh.read(rows * cols * 4), dtype="<f4")
    heights = data.reshape(rows, cols).astype(np.float64)
    return Heightfield(rows=rows, cols=cols, cell_size_x=csx, cell_size_y=csy,
                       heights=heights)


def write_csv(hf: Heightfield, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        for row in hf.heights:
            writer.writerow([repr(float(v)) for v in row])


def read_csv(path: str, cell_size_x: float = 1.0, cell_size_y: float = 1.0) -> Heightfield:
    with open(path, newline="") as fh:
        rows = [[float(v) for v in line] for line in _csv.reader(fh) if line]
    heights = np.asarray(rows, dtype=np.float64)
    return Heightfield(rows=heights.shape[0], cols=heights.shape[1],
                       cell_size_x=cell_size_x, cell_size_y=cell_size_y,
                       heights=heights)
