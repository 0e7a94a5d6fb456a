import csv

import numpy as np
import pytest

from trainbridge.ppo import BaselineConfig, train_ppo


def _read_curve(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_zero_steps_writes_header_only(tmp_path):
    cfg = BaselineConfig(
        task_id="velocity_tracking", num_envs=2, total_env_steps=0, seed=1,
        csv_path=str(tmp_path / "curve.csv"),
        checkpoint_path=str(tmp_path / "ckpt.pt"),
    )
    history = train_ppo(cfg)
    assert history == []
    rows = _read_curve(cfg.csv_path)
    assert rows == []
    header = open(cfg.csv_path).readline().strip().split(",")
    assert header == ["env_steps", "mean_return", "success_rate", "mean_tracking"]


def test_checkpoint_written(tmp_path):
    import torch

    cfg = BaselineConfig(
        task_id="velocity_tracking", num_envs=4, total_env_steps=4 * 16, seed=2,
        rollout_len=16, minibatch_size=32, epochs=2,
        csv_path=str(tmp_path / "curve.csv"),
        checkpoint_path=str(tmp_path / "ckpt.pt"),
    )
    history = train_ppo(cfg)
    assert len(history) == 1
    ckpt = torch.load(cfg.checkpoint_path, weights_only=False)
    assert "model" in ckpt and ckpt["config"]["seed"] == 2


def test_same_seed_identical_first_rollout(tmp_path):
    stats = []
    for run in range(2):
        cfg = BaselineConfig(
            task_id="velocity_tracking", num_envs=4, total_env_steps=4 * 32, seed=11,
            rollout_len=32, minibatch_size=64, epochs=2,
            csv_path=str(tmp_path / f"curve{run}.csv"),
            checkpoint_path=str(tmp_path / f"ckpt{run}.pt"),
        )
        history = train_ppo(cfg)
        stats.append(history[0])
    a, b = stats
    assert a.env_steps == b.env_steps
    assert a.mean_tracking == b.mean_tracking
    np.testing.assert_equal(a.mean_return, b.mean_return)  # nan-aware
    np.testing.assert_equal(a.success_rate, b.success_rate)


def test_curve_rows_accumulate(tmp_path):
    cfg = BaselineConfig(
        task_id="velocity_tracking", num_envs=4, total_env_steps=4 * 16 * 3, seed=3,
        rollout_len=16, minibatch_size=32, epochs=1,
        csv_path=str(tmp_path / "curve.csv"),
        checkpoint_path=str(tmp_path / "ckpt.pt"),
    )
    history = train_ppo(cfg)
    rows = _read_curve(cfg.csv_path)
    assert len(rows) == len(history) == 3
    assert [int(r["env_steps"]) for r in rows] == [64, 128, 192]
    assert all(np.isfinite(float(r["mean_tracking"])) for r in rows)
