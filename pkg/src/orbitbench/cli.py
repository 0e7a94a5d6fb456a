"""Unified command line: list, run, bench, gen-terrain, manifest, probe.

Exit codes: 0 success, 2 usage error (argparse), 3 unknown id or
incompatible combination, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from .errors import IncompatibleConfigError, NotRegisteredError, OrbitbenchError
from .noise import NoiseParams
from .oracles import WaypointOracle, make_policy
from .rng import RngKey, Stream
from .runtime import (
    EnvVectorConfig,
    create_vector_env,
    emit_manifest,
    get_registry,
    record_episode,
    write_manifest,
)
from .tasks import compute_ate
from .terrain import TerrainBlueprint, generate_heightfield, write_csv, write_orbh

EXIT_OK = 0
EXIT_REGISTRY = 3
EXIT_IO = 4


def _env_config(args, num_envs: int, seed: int, **extra) -> EnvVectorConfig:
    return EnvVectorConfig(
        task_id=args.task,
        domain=getattr(args, "domain", None),
        robot=getattr(args, "robot", None),
        action_model=getattr(args, "action_model", None),
        num_envs=num_envs,
        global_seed=seed,
        **extra,
    )


def cmd_list(args) -> int:
    listing = get_registry().listing()
    if args.json:
        print(json.dumps(listing, sort_keys=True, separators=(",", ":")))
        return EXIT_OK
    for section in ("tasks", "domains", "robots", "action_models"):
        print(f"{section}:")
        for item in listing[section]:
            print(f"  {item}")
    print("compatibility (task, robot, action_model):")
    for triple in listing["compatibility"]:
        print("  " + " / ".join(triple))
    return EXIT_OK


def _run_episodes(env, policy, episodes: int, collect_ate: bool):
    """One episode per environment; returns per-episode returns/success/ATE."""
    obs = env.reset()
    returns = np.zeros(episodes)
    success = np.zeros(episodes, dtype=bool)
    active = np.ones(episodes, dtype=bool)
    traj: list[list] = [[] for _ in range(episodes)]
    ref: list[list] = [[] for _ in range(episodes)]
    ref_pose = None
    if collect_ate:
        ref_pose = np.concatenate(
            [obs["state"]["position"][:, :2], np.zeros((episodes, 1))], axis=1
        ).astype(np.float64)
        from .rotations import rot6d_decode

        rot = rot6d_decode(obs["state"]["rotation6d"].astype(np.float64))
        ref_pose[:, 2] = np.arctan2(rot[:, 1, 0], rot[:, 0, 0])
    t = 0
    while active.any():
        actions = policy(obs, t)
        if collect_ate:
            cmd = obs["command"]["target_twist"].astype(np.float64)
        batch = env.step(actions)
        returns[active] += batch.reward[active]
        if collect_ate:
            dt = 1.0 / env.control_rate_hz
            ref_pose[:, 2] += cmd[:, 1] * dt
            ref_pose[:, 0] += np.cos(ref_pose[:, 2]) * cmd[:, 0] * dt
            ref_pose[:, 1] += np.sin(ref_pose[:, 2]) * cmd[:, 0] * dt
            pos = batch.obs["state"]["position"].astype(np.float64)
            for i in np.flatnonzero(active):
                traj[i].append(pos[i, :2].copy())
                ref[i].append(ref_pose[i, :2].copy())
        ended = batch.terminated | batch.truncated
        newly = ended & active
        success[newly] = batch.success[newly]
        active &= ~ended
        obs = batch.obs
        t += 1
    ate = None
    if collect_ate:
        locs = [compute_ate(np.asarray(traj[i]), np.asarray(ref[i]))[0] for i in range(episodes)]
        ate = float(np.mean(locs))
    return returns, success, ate


def cmd_run(args) -> int:
    if args.episodes == 0:
        print(json.dumps({"episodes": 0, "mean_return": None, "success_rate": None}))
        return EXIT_OK
    cfg = _env_config(args, num_envs=args.episodes, seed=args.seed)
    env = create_vector_env(cfg)
    policy = make_policy(args.policy, env.action_dim, env.num_envs, args.seed, args.task)
    if args.log:
        record_episode(env, policy, args.log)
    collect_ate = args.task == "velocity_tracking"
    returns, success, ate = _run_episodes(env, policy, args.episodes, collect_ate)
    env.close()
    summary = {
        "task": args.task,
        "policy": args.policy,
        "episodes": args.episodes,
        "mean_return": float(np.mean(returns)),
        "success_rate": float(np.mean(success)),
    }
    if ate is not None:
        summary["loc_ate_m"] = ate
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def run_bench(task, domain, env_counts, seed, duration_s=None, steps=None,
              registry=None):
    """Random-action throughput sweep; one row per environment count."""
    rows = []
    for n in env_counts:
        cfg = EnvVectorConfig(task_id=task, domain=domain, num_envs=n, global_seed=seed)
        env = create_vector_env(cfg, registry)
        from .oracles import RandomPolicy

        policy = RandomPolicy(env.action_dim, n, seed)
        obs = env.reset()
        for t in range(3):  # warmup
            obs = env.step(policy(obs, t)).obs
        done_steps = 0
        t0 = time.perf_counter()
        if steps is not None:
            for t in range(steps):
                obs = env.step(policy(obs, t)).obs
            done_steps = steps
        else:
            while time.perf_counter() - t0 < duration_s:
                obs = env.step(policy(obs, done_steps)).obs
                done_steps += 1
        wall = time.perf_counter() - t0
        env.close()
        rows.append({
            "num_envs": n,
            "total_steps": done_steps,
            "wall_seconds": wall,
            "steps_per_second": done_steps * n / wall,
        })
    return rows


def cmd_bench(args) -> int:
    env_counts = [int(v) for v in args.env_counts.split(",")]
    rows = run_bench(
        args.task, args.domain, env_counts, args.seed,
        duration_s=None if args.steps else args.duration,
        steps=args.steps,
    )
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.DictWriter(
        out, fieldnames=["num_envs", "total_steps", "wall_seconds", "steps_per_second"]
    )
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    if args.out:
        out.close()
    return EXIT_OK


def _blueprint_from_args(args) -> TerrainBlueprint:
    return TerrainBlueprint(
        rows=args.rows,
        cols=args.cols,
        extent_x=args.extent,
        extent_y=args.extent,
        macro=NoiseParams(frequency=args.macro_frequency, amplitude=args.macro_amplitude, octaves=2),
        meso=NoiseParams(frequency=args.meso_frequency, amplitude=args.meso_amplitude, octaves=3),
        crater_density=args.crater_density,
    )


def cmd_gen_terrain(args) -> int:
    bp = _blueprint_from_args(args)
    key = RngKey(args.seed, env_index=args.env_index, stream_id=int(Stream.TERRAIN))
    hf = generate_heightfield(bp, key)
    try:
        if args.format == "orbh":
            write_orbh(hf, args.out)
        else:
            write_csv(hf, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out!r}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {args.out} ({hf.rows}x{hf.cols}, format {args.format})")
    return EXIT_OK


def cmd_manifest(args) -> int:
    cfg = _env_config(args, num_envs=1, seed=args.seed)
    env = create_vector_env(cfg)
    manifest = emit_manifest(env)
    env.close()
    try:
        write_manifest(manifest, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out!r}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {args.out}")
    return EXIT_OK


def tune_waypoint_oracle(seed: int, episodes: int = 8):
    """Pick oracle gains by a small grid search on one terrain seed."""
    best = None
    for turn_gain in (1.5, 2.0, 3.0):
        for speed_gain in (1.0, 1.5, 2.5):
            cfg = EnvVectorConfig(
                task_id="waypoint_navigation", num_envs=episodes, global_seed=seed,
                terrain_shared=True,
            )
            env = create_vector_env(cfg)
            policy = WaypointOracle(turn_gain=turn_gain, speed_gain=speed_gain)
            returns, success, _ = _run_episodes(env, policy, episodes, False)
            env.close()
            score = (float(np.mean(success)), float(np.mean(returns)))
            if best is None or score > best[0]:
                best = (score, {"turn_gain": turn_gain, "speed_gain": speed_gain})
    return best[1]


def run_probe(tune_seed: int, holdout_seeds: int, episodes: int):
    """Generalization probe: tune on one terrain, evaluate on held-out ones."""
    gains = tune_waypoint_oracle(tune_seed)
    rows = []

    def evaluate(seed: int, regime: str):
        cfg = EnvVectorConfig(
            task_id="waypoint_navigation", num_envs=episodes, global_seed=seed,
            terrain_shared=True,
        )
        env = create_vector_env(cfg)
        policy = WaypointOracle(**gains)
        returns, success, _ = _run_episodes(env, policy, episodes, False)
        env.close()
        rows.append({
            "regime": regime,
            "terrain_seed": seed,
            "episodes": episodes,
            "success_rate": float(np.mean(success)),
            "mean_return": float(np.mean(returns)),
        })

    evaluate(tune_seed, "tuning")
    for i in range(holdout_seeds):
        evaluate(tune_seed + 1 + i, "heldout")
    return gains, rows


def cmd_probe(args) -> int:
    gains, rows = run_probe(args.tune_seed, args.holdout_seeds, args.episodes)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.DictWriter(
        out, fieldnames=["regime", "terrain_seed", "episodes", "success_rate", "mean_return"]
    )
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    if args.out:
        out.close()
        print(f"tuned gains: {gains}; wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbitbench",
        description="Deterministic parallel simulation benchmark for space mobile robotics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="print registry contents")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_list)

    def common(p):
        p.add_argument("--task", required=True)
        p.add_argument("--domain", default=None)
        p.add_argument("--robot", default=None)
        p.add_argument("--action-model", dest="action_model", default=None)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("run", help="roll out a policy and print a summary")
    common(p)
    p.add_argument("--policy", default="random", help="random | zero | oracle")
    p.add_argument("--episodes", type=int, default=10)
    p.add_argument("--log", default=None, help="write a JSONL episode log here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="measure aggregate steps per second")
    common(p)
    p.add_argument("--env-counts", default="1,64,1024")
    p.add_argument("--duration", type=float, default=10.0, help="seconds per row")
    p.add_argument("--steps", type=int, default=None,
                   help="fixed step budget per row (deterministic mode)")
    p.add_argument("--out", default=None, help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen-terrain", help="export a procedural heightfield")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--env-index", type=int, default=0)
    p.add_argument("--rows", type=int, default=129)
    p.add_argument("--cols", type=int, default=129)
    p.add_argument("--extent", type=float, default=16.0)
    p.add_argument("--macro-frequency", type=float, default=0.05)
    p.add_argument("--macro-amplitude", type=float, default=0.4)
    p.add_argument("--meso-frequency", type=float, default=0.4)
    p.add_argument("--meso-amplitude", type=float, default=0.05)
    p.add_argument("--crater-density", type=float, default=0.03)
    p.add_argument("--format", choices=("orbh", "csv"), default="orbh")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_terrain)

    p = sub.add_parser("manifest", help="emit the interface manifest as JSON")
    common(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_manifest)

    p = sub.add_parser("probe", help="static-vs-procedural generalization probe")
    p.add_argument("--tune-seed", type=int, default=0)
    p.add_argument("--holdout-seeds", type=int, default=20)
    p.add_argument("--episodes", type=int, default=5)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_probe)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NotRegisteredError, IncompatibleConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGISTRY
    except (OSError, OrbitbenchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
