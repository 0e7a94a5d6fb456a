"""Benchmark task suite: reset distributions, rewards, termination, metrics."""

from .base import (
    BlockContext,
    EpisodeStatus,
    ObsEntry,
    RewardBreakdown,
    StepSlice,
    TaskBatch,
    TaskSpec,
    VehicleMapper,
    exp_kernel,
)
from .metrics import compute_ate
from .rover import (
    VelocityTrackingBatch,
    WaypointNavigationBatch,
    velocity_tracking_spec,
    waypoint_navigation_spec,
)
from .spacecraft import (
    LandingBatch,
    OrbitalEvasionBatch,
    OrbitalWaypointBatch,
    RendezvousBatch,
    landing_spec,
    orbital_evasion_spec,
    orbital_waypoint_spec,
    rendezvous_spec,
)


def assemble_observation(batch: TaskBatch) -> dict:
    """Current observation bundle of a task batch (group -> name -> array)."""
    return batch._observe()


__all__ = [
    "BlockContext",
    "EpisodeStatus",
    "ObsEntry",
    "RewardBreakdown",
    "StepSlice",
    "TaskBatch",
    "TaskSpec",
    "VehicleMapper",
    "exp_kernel",
    "compute_ate",
    "assemble_observation",
    "VelocityTrackingBatch",
    "WaypointNavigationBatch",
    "velocity_tracking_spec",
    "waypoint_navigation_spec",
    "LandingBatch",
    "OrbitalEvasionBatch",
    "OrbitalWaypointBatch",
    "RendezvousBatch",
    "landing_spec",
    "orbital_evasion_spec",
    "orbital_waypoint_spec",
    "rendezvous_spec",
]
