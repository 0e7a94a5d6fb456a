import numpy as np

from orbitbench.dynamics import DisturbanceModel, DomainRandomization
from orbitbench.noise import NoiseParams
from orbitbench.runtime.registry import get_registry
from orbitbench.tasks import BlockContext, VehicleMapper
from orbitbench.terrain import TerrainBlueprint

FIXED_DR = DomainRandomization(
    friction_scale=(1.0, 1.0), inertia_scale=(1.0, 1.0),
    slip_lin=(1.0, 1.0), slip_ang=(1.0, 1.0),
)


def flat_blueprint(extent=8.0, n=65):
    return TerrainBlueprint(
        rows=n, cols=n, extent_x=extent, extent_y=extent,
        macro=NoiseParams(frequency=0.05, amplitude=0.0),
        meso=NoiseParams(frequency=0.4, amplitude=0.0),
        crater_density=0.0, rock_density=0.0,
    )


def make_batch(task_id, n=2, seed=0, weights=None, params=None, dr=None,
               disturbance=None, action_model=None, domain=None,
               max_episode_steps=None, blueprint=None):
    """Standalone task batch with deterministic defaults for unit tests."""
    reg = get_registry()
    td = reg.task(task_id)
    dom = reg.domain(domain or td.default_domain)
    spec = td.spec_factory(dom).merged(
        weights=weights, params=params, max_episode_steps=max_episode_steps
    )
    robot = reg.robot(td.default_robot)
    mapper = VehicleMapper(robot.config, action_model or td.default_action_model)
    ctx = BlockContext(
        env_ids=np.arange(n, dtype=np.int64),
        base_seed=seed,
        spec=spec,
        robot=robot.config,
        mapper=mapper,
        dt=0.02,
        decimation=1,
        dr=dr or FIXED_DR,
        disturbance=disturbance or DisturbanceModel(),
        blueprint=blueprint
        or (td.blueprint_factory() if td.blueprint_factory else TerrainBlueprint()),
    )
    return td.batch_cls(ctx)
