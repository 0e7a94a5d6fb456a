"""orbitbench: deterministic parallel simulation benchmark for space mobile robotics."""

__version__ = "0.1.0"

from .dynamics import (  # noqa: E402
    DOMAIN_PRESETS,
    BodyParams,
    DisturbanceModel,
    DomainPreset,
    DomainRandomization,
    RigidBodyState,
)
from .noise import NoiseParams  # noqa: E402
from .rng import RngKey, Stream  # noqa: E402
from .terrain import Heightfield, TerrainBlueprint  # noqa: E402

__all__ = [
    "__version__",
    "DOMAIN_PRESETS",
    "BodyParams",
    "DisturbanceModel",
    "DomainPreset",
    "DomainRandomization",
    "Heightfield",
    "NoiseParams",
    "RigidBodyState",
    "RngKey",
    "Stream",
    "TerrainBlueprint",
]
