"""Training entry point mirroring the engine CLI's flag names."""

from __future__ import annotations

import argparse
import sys

from .ppo import BaselineConfig, train_ppo


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trainbridge", description="PPO baseline over orbitbench environments"
    )
    parser.add_argument("--task", default="velocity_tracking")
    parser.add_argument("--num-envs", type=int, default=512)
    parser.add_argument("--total-steps", type=int, default=5_000_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--csv", default="learning_curve.csv")
    parser.add_argument("--checkpoint", default="ppo_checkpoint.pt")
    parser.add_argument("--exclude-privileged", action="store_true",
                        help="hide the privileged state group from the policy")
    parser.add_argument("--early-stop-tracking", type=float, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = BaselineConfig(
        task_id=args.task,
        num_envs=args.num_envs,
        total_env_steps=args.total_steps,
        seed=args.seed,
        csv_path=args.csv,
        checkpoint_path=args.checkpoint,
        include_privileged=not args.exclude_privileged,
        early_stop_tracking=args.early_stop_tracking,
    )
    history = train_ppo(cfg)
    if history:
        last = history[-1]
        print(f"trained {last.env_steps} env steps; mean return {last.mean_return:.2f}, "
              f"success rate {last.success_rate:.2f}, mean tracking {last.mean_tracking:.3f}")
    else:
        print("no training iterations ran (step budget below one rollout)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
