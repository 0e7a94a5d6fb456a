"""Component registry: tasks, domains, robots, action models, compatibility.

Every component is registered under a string id; environment construction
resolves ids through this table and rejects combinations that are not
listed as compatible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..actuation import cubesat_layout
from ..dynamics import DOMAIN_PRESETS, BodyParams, DisturbanceModel
from ..errors import IncompatibleConfigError, NotRegisteredError
from ..noise import NoiseParams
from ..tasks import (
    LandingBatch,
    OrbitalEvasionBatch,
    OrbitalWaypointBatch,
    RendezvousBatch,
    VelocityTrackingBatch,
    WaypointNavigationBatch,
    landing_spec,
    orbital_evasion_spec,
    orbital_waypoint_spec,
    rendezvous_spec,
    velocity_tracking_spec,
    waypoint_navigation_spec,
)
from ..terrain import TerrainBlueprint

ACTION_MODELS = ("wheeled_twist", "wheeled_joint_vel", "thruster_bank", "target_accel")


@dataclass(frozen=True)
class RobotDef:
    id: str
    group: str  # wheeled | spacecraft
    config: dict


@dataclass(frozen=True)
class TaskDef:
    id: str
    batch_cls: type
    spec_factory: Callable
    default_domain: str
    robots: tuple[str, ...]
    default_robot: str
    action_models: tuple[str, ...]
    default_action_model: str
    needs_terrain: bool = False
    blueprint_factory: Callable | None = None
    disturbance: DisturbanceModel = field(default_factory=DisturbanceModel)


def _rover_robot() -> RobotDef:
    return RobotDef(
        id="rover",
        group="wheeled",
        config={
            "params": BodyParams(mass=20.0, inertia_diag=(0.8, 0.8, 1.0)),
            "v_max": 0.5,
            "omega_max": 1.5,
            "wheel_radius": 0.0625,
            "track": 0.35,
            "wheel_speed_max": 10.0,
        },
    )


def _cubesat_robot() -> RobotDef:
    return RobotDef(
        id="cubesat",
        group="spacecraft",
        config={
            "params": BodyParams(mass=10.0, inertia_diag=(0.6, 0.6, 0.6), fuel_capacity=2.0),
            "layout": cubesat_layout(),
            "a_lin_max": 5.0,
            "a_ang_max": 2.0,
        },
    )


def _rover_blueprint() -> TerrainBlueprint:
    return TerrainBlueprint()


def _landing_blueprint() -> TerrainBlueprint:
    return TerrainBlueprint(
        rows=101,
        cols=101,
        extent_x=20.0,
        extent_y=20.0,
        macro=NoiseParams(frequency=0.03, amplitude=0.3, octaves=2),
        meso=NoiseParams(frequency=0.3, amplitude=0.03, octaves=3),
        crater_density=0.01,
        crater_radius_range=(0.5, 1.5),
        rock_density=0.05,
    )


class Registry:
    def __init__(self):
        self.tasks: dict[str, TaskDef] = {}
        self.robots: dict[str, RobotDef] = {}
        self.domains = dict(DOMAIN_PRESETS)

    def register_task(self, t: TaskDef):
        self.tasks[t.id] = t

    def register_robot(self, r: RobotDef):
        self.robots[r.id] = r

    def task(self, task_id: str) -> TaskDef:
        if task_id not in self.tasks:
            raise NotRegisteredError(
                f"unknown task {task_id!r}; registered: {sorted(self.tasks)}"
            )
        return self.tasks[task_id]

    def robot(self, robot_id: str) -> RobotDef:
        if robot_id not in self.robots:
            raise NotRegisteredError(
                f"unknown robot {robot_id!r}; registered: {sorted(self.robots)}"
            )
        return self.robots[robot_id]

    def domain(self, name: str):
        if name not in self.domains:
            raise NotRegisteredError(
                f"unknown domain {name!r}; registered: {sorted(self.domains)}"
            )
        return self.domains[name]

    def check_compatible(self, task_id: str, robot_id: str, model_id: str):
        t = self.task(task_id)
        if robot_id not in t.robots or model_id not in t.action_models:
            valid = [(task_id, r, m) for r in t.robots for m in t.action_models]
            raise IncompatibleConfigError(
                f"({task_id}, {robot_id}, {model_id}) is not a registered "
                f"combination; valid: {valid}"
            )

    def triples(self):
        """Every advertised (task, robot, action model) combination."""
        out = []
        for t in self.tasks.values():
            for r in t.robots:
                for m in t.action_models:
                    out.append((t.id, r, m))
        return out

    def listing(self) -> dict:
        return {
            "tasks": sorted(self.tasks),
            "domains": sorted(self.domains),
            "robots": sorted(self.robots),
            "action_models": sorted(ACTION_MODELS),
            "compatibility": [list(t) for t in sorted(self.triples())],
        }


def default_registry() -> Registry:
    reg = Registry()
    reg.register_robot(_rover_robot())
    reg.register_robot(_cubesat_robot())

    wheeled = ("wheeled_twist", "wheeled_joint_vel")
    craft = ("thruster_bank", "target_accel")

    reg.register_task(TaskDef(
        id="velocity_tracking",
        batch_cls=VelocityTrackingBatch,
        spec_factory=velocity_tracking_spec,
        default_domain="moon",
        robots=("rover",),
        default_robot="rover",
        action_models=wheeled,
        default_action_model="wheeled_twist",
        needs_terrain=True,
        blueprint_factory=_rover_blueprint,
        disturbance=DisturbanceModel(force_std=1.0, torque_std=0.0),
    ))
    reg.register_task(TaskDef(
        id="waypoint_navigation",
        batch_cls=WaypointNavigationBatch,
        spec_factory=waypoint_navigation_spec,
        default_domain="moon",
        robots=("rover",),
        default_robot="rover",
        action_models=wheeled,
        default_action_model="wheeled_twist",
        needs_terrain=True,
        blueprint_factory=_rover_blueprint,
        disturbance=DisturbanceModel(force_std=1.0, torque_std=0.0),
    ))
    reg.register_task(TaskDef(
        id="landing",
        batch_cls=LandingBatch,
        spec_factory=landing_spec,
        default_domain="moon",
        robots=("cubesat",),
        default_robot="cubesat",
        action_models=craft,
        default_action_model="thruster_bank",
        needs_terrain=True,
        blueprint_factory=_landing_blueprint,
        disturbance=DisturbanceModel(force_std=0.03, torque_std=0.001),
    ))
    reg.register_task(TaskDef(
        id="rendezvous",
        batch_cls=RendezvousBatch,
        spec_factory=rendezvous_spec,
        default_domain="orbit",
        robots=("cubesat",),
        default_robot="cubesat",
        action_models=craft,
        default_action_model="thruster_bank",
        disturbance=DisturbanceModel(force_std=0.05, torque_std=0.002),
    ))
    reg.register_task(TaskDef(
        id="orbital_evasion",
        batch_cls=OrbitalEvasionBatch,
        spec_factory=orbital_evasion_spec,
        default_domain="orbit",
        robots=("cubesat",),
        default_robot="cubesat",
        action_models=craft,
        default_action_model="thruster_bank",
        disturbance=DisturbanceModel(force_std=0.05, torque_std=0.002),
    ))
    reg.register_task(TaskDef(
        id="orbital_waypoint_navigation",
        batch_cls=OrbitalWaypointBatch,
        spec_factory=orbital_waypoint_spec,
        default_domain="orbit",
        robots=("cubesat",),
        default_robot="cubesat",
        action_models=craft,
        default_action_model="thruster_bank",
        disturbance=DisturbanceModel(force_std=0.05, torque_std=0.002),
    ))
    return reg


_DEFAULT: Registry | None = None


def get_registry() -> Registry:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = default_registry()
    return _DEFAULT
