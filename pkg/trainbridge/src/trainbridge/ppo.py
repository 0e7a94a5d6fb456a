"""PPO baseline over the vectorized bridge.

Hyperparameters mirror the reference training protocol: lr 1e-4 annealed
linearly to zero, gamma 0.997, 128-step rollouts per env, minibatch 1024,
16 epochs per rollout, GAE lambda 0.95, clip 0.2, entropy 0.01, grad-norm
clip 0.5, two 384-unit hidden layers for both actor and critic.  Anything
not pinned follows the common library defaults (value coef 0.5, tanh
activations, orthogonal init, state-independent log-std).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from .bridge import BridgeConfig, OrbitbenchVectorEnv


@dataclass
class BaselineConfig:
    task_id: str = "velocity_tracking"
    num_envs: int = 512
    total_env_steps: int = 5_000_000
    seed: int = 0
    learning_rate: float = 1e-4
    gamma: float = 0.997
    rollout_len: int = 128
    minibatch_size: int = 1024
    epochs: int = 16
    gae_lambda: float = 0.95
    clip_range: float = 0.2
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    max_grad_norm: float = 0.5
    hidden: tuple[int, int] = (384, 384)
    include_privileged: bool = True
    csv_path: str = "learning_curve.csv"
    checkpoint_path: str = "ppo_checkpoint.pt"
    early_stop_tracking: float | None = None  # stop once mean tracking clears this
    bridge: dict = field(default_factory=dict)  # extra BridgeConfig fields


def _mlp(in_dim: int, hidden, out_dim: int) -> nn.Sequential:
    layers: list[nn.Module] = []
    last = in_dim
    for h in hidden:
        layers += [nn.Linear(last, h), nn.Tanh()]
        last = h
    layers.append(nn.Linear(last, out_dim))
    net = nn.Sequential(*layers)
    for i, m in enumerate(net):
        if isinstance(m, nn.Linear):
            gain = 0.01 if i == len(net) - 1 else math.sqrt(2.0)
            nn.init.orthogonal_(m.weight, gain)
            nn.init.zeros_(m.bias)
    return net


class ActorCritic(nn.Module):
    def __init__(self, obs_dim: int, act_dim: int, hidden):
        super().__init__()
        self.actor = _mlp(obs_dim, hidden, act_dim)
        self.critic = _mlp(obs_dim, hidden, 1)
        self.log_std = nn.Parameter(torch.zeros(act_dim))

    def distribution(self, obs: torch.Tensor) -> torch.distributions.Normal:
        mean = self.actor(obs)
        return torch.distributions.Normal(mean, self.log_std.exp())

    def value(self, obs: torch.Tensor) -> torch.Tensor:
        return self.critic(obs).squeeze(-1)


@dataclass
class IterationStats:
    env_steps: int
    mean_return: float
    success_rate: float
    mean_tracking: float


def _episode_stats(finals: list[dict], returns: list[float]):
    if not returns:
        return float("nan"), float("nan")
    succ = [f["success"] for f in finals]
    return float(np.mean(returns)), float(np.mean(succ)) if succ else float("nan")


def train_ppo(cfg: BaselineConfig) -> list[IterationStats]:
    """Run PPO; writes the learning-curve CSV incrementally, saves a checkpoint.

    Returns the per-iteration statistics that were written to the CSV.
    """
    torch.manual_seed(cfg.seed)
    torch.set_num_threads(max(1, torch.get_num_threads()))

    env = OrbitbenchVectorEnv(BridgeConfig(
        task_id=cfg.task_id, num_envs=cfg.num_envs, seed=cfg.seed,
        include_privileged=cfg.include_privileged, **cfg.bridge,
    ))
    obs_dim = env.single_observation_space.shape[0]
    act_dim = env.single_action_space.shape[0]
    model = ActorCritic(obs_dim, act_dim, cfg.hidden)
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)

    steps_per_iter = cfg.rollout_len * cfg.num_envs
    iterations = max(1, cfg.total_env_steps // steps_per_iter)

    csv_file = open(cfg.csv_path, "w", newline="")
    writer = csv.writer(csv_file)
    writer.writerow(["env_steps", "mean_return", "success_rate", "mean_tracking"])
    csv_file.flush()
    history: list[IterationStats] = []

    if cfg.total_env_steps < steps_per_iter:
        csv_file.close()
        env.close()
        torch.save({"model": model.state_dict(), "config": cfg.__dict__}, cfg.checkpoint_path)
        return history

    obs_np, _ = env.reset(seed=cfg.seed)
    episode_return = np.zeros(cfg.num_envs)
    finished_returns: list[float] = []
    finished_finals: list[dict] = []

    for it in range(iterations):
        # linear anneal over the declared budget
        frac = 1.0 - it / iterations
        for group in optimizer.param_groups:
            group["lr"] = cfg.learning_rate * frac

        obs_buf = np.empty((cfg.rollout_len, cfg.num_envs, obs_dim), dtype=np.float32)
        act_buf = np.empty((cfg.rollout_len, cfg.num_envs, act_dim), dtype=np.float32)
        logp_buf = np.empty((cfg.rollout_len, cfg.num_envs), dtype=np.float32)
        val_buf = np.empty((cfg.rollout_len, cfg.num_envs), dtype=np.float32)
        rew_buf = np.empty((cfg.rollout_len, cfg.num_envs), dtype=np.float32)
        done_buf = np.empty((cfg.rollout_len, cfg.num_envs), dtype=np.float32)
        tracking_sum = 0.0
        tracking_count = 0

        with torch.no_grad():
            for t in range(cfg.rollout_len):
                obs_t = torch.as_tensor(obs_np)
                dist = model.distribution(obs_t)
                action = dist.sample()
                logp = dist.log_prob(action).sum(-1)
                value = model.value(obs_t)

                clipped = torch.clamp(action, -1.0, 1.0).numpy()
                next_obs, reward, terminated, truncated, info = env.step(clipped)

                obs_buf[t] = obs_np
                act_buf[t] = action.numpy()
                logp_buf[t] = logp.numpy()
                val_buf[t] = value.numpy()
                rew_buf[t] = reward
                done = terminated | truncated
                done_buf[t] = done

                terms = info.get("terms", {})
                if "track_lin" in terms:
                    tracking_sum += float(
                        np.mean(0.5 * (terms["track_lin"] + terms["track_ang"]))
                    )
                    tracking_count += 1

                episode_return += reward
                if done.any():
                    for i in np.flatnonzero(done):
                        finished_returns.append(float(episode_return[i]))
                        episode_return[i] = 0.0
                    for rec in info.get("final", {}).values():
                        finished_finals.append(rec)
                obs_np = next_obs

            last_value = model.value(torch.as_tensor(obs_np)).numpy()

        advantages = np.zeros_like(rew_buf)
        last_gae = np.zeros(cfg.num_envs, dtype=np.float32)
        for t in reversed(range(cfg.rollout_len)):
            next_values = last_value if t == cfg.rollout_len - 1 else val_buf[t + 1]
            non_terminal = 1.0 - done_buf[t]
            delta = rew_buf[t] + cfg.gamma * next_values * non_terminal - val_buf[t]
            last_gae = delta + cfg.gamma * cfg.gae_lambda * non_terminal * last_gae
            advantages[t] = last_gae
        returns = advantages + val_buf

        flat = {
            "obs": torch.as_tensor(obs_buf.reshape(-1, obs_dim)),
            "act": torch.as_tensor(act_buf.reshape(-1, act_dim)),
            "logp": torch.as_tensor(logp_buf.reshape(-1)),
            "adv": torch.as_tensor(advantages.reshape(-1)),
            "ret": torch.as_tensor(returns.reshape(-1)),
        }
        n = flat["obs"].shape[0]
        gen = torch.Generator().manual_seed(cfg.seed * 1_000_003 + it)
        for _epoch in range(cfg.epochs):
            perm = torch.randperm(n, generator=gen)
            for lo in range(0, n, cfg.minibatch_size):
                idx = perm[lo:lo + cfg.minibatch_size]
                obs_b = flat["obs"][idx]
                adv_b = flat["adv"][idx]
                adv_b = (adv_b - adv_b.mean()) / (adv_b.std() + 1e-8)

                dist = model.distribution(obs_b)
                logp = dist.log_prob(flat["act"][idx]).sum(-1)
                ratio = torch.exp(logp - flat["logp"][idx])
                clipped_ratio = torch.clamp(
                    ratio, 1.0 - cfg.clip_range, 1.0 + cfg.clip_range
                )
                policy_loss = -torch.min(ratio * adv_b, clipped_ratio * adv_b).mean()
                value_loss = nn.functional.mse_loss(model.value(obs_b), flat["ret"][idx])
                entropy = dist.entropy().sum(-1).mean()
                loss = (policy_loss + cfg.value_coef * value_loss
                        - cfg.entropy_coef * entropy)
                if not torch.isfinite(loss):
                    csv_file.close()
                    env.close()
                    raise RuntimeError(
                        f"PPO diverged (non-finite loss) at iteration {it}: "
                        f"policy {policy_loss.item()!r}, value {value_loss.item()!r}"
                    )
                optimizer.zero_grad()
                loss.backward()
                nn.utils.clip_grad_norm_(model.parameters(), cfg.max_grad_norm)
                optimizer.step()

        env_steps = (it + 1) * steps_per_iter
        mean_return, success_rate = _episode_stats(finished_finals, finished_returns)
        finished_returns.clear()
        finished_finals.clear()
        mean_tracking = tracking_sum / tracking_count if tracking_count else float("nan")
        stats = IterationStats(env_steps, mean_return, success_rate, mean_tracking)
        history.append(stats)
        writer.writerow([stats.env_steps, stats.mean_return, stats.success_rate,
                         stats.mean_tracking])
        csv_file.flush()

        if (cfg.early_stop_tracking is not None
                and not math.isnan(mean_tracking)
                and mean_tracking >= cfg.early_stop_tracking):
            break

    csv_file.close()
    env.close()
    torch.save({"model": model.state_dict(), "config": cfg.__dict__}, cfg.checkpoint_path)
    return history
