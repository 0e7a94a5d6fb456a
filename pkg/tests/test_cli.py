import csv
import io
import json
import struct

import numpy as np
import pytest

from orbitbench.cli import main, run_bench, run_probe


def test_list_contains_expected_ids(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "waypoint_navigation" in out
    for domain in ("orbit", "asteroid", "moon", "mars", "earth"):
        assert domain in out


def test_list_json_round_trips(capsys):
    assert main(["list", "--json"]) == 0
    listing = json.loads(capsys.readouterr().out)
    assert "velocity_tracking" in listing["tasks"]
    assert len(listing["domains"]) == 5
    assert ["landing", "cubesat", "thruster_bank"] in listing["compatibility"]


def test_unknown_task_exit_code(capsys):
    assert main(["run", "--task", "excavation", "--episodes", "1"]) == 3


def test_usage_error_exit_code_two():
    with pytest.raises(SystemExit) as exc:
        main(["run"])  # --task is required
    assert exc.value.code == 2


def test_incompatible_combo_exit_code(capsys):
    code = main([
        "manifest", "--task", "landing", "--robot", "rover",
        "--action-model", "wheeled_twist", "--out", "/tmp/never.json",
    ])
    assert code == 3


def test_run_zero_episodes(capsys):
    assert main(["run", "--task", "landing", "--episodes", "0"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["episodes"] == 0


def test_run_summary_fields(capsys):
    code = main([
        "run", "--task", "velocity_tracking", "--policy", "zero",
        "--episodes", "2", "--seed", "5",
    ])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["episodes"] == 2
    assert "mean_return" in summary and "success_rate" in summary
    assert "loc_ate_m" in summary  # velocity tracking reports ATE


def test_bench_steps_mode_csv(capsys):
    code = main([
        "bench", "--task", "velocity_tracking", "--env-counts", "1,2",
        "--steps", "5", "--seed", "1",
    ])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 2
    assert [int(r["num_envs"]) for r in rows] == [1, 2]
    assert all(int(r["total_steps"]) == 5 for r in rows)
    assert all(float(r["steps_per_second"]) > 0 for r in rows)


def test_bench_steps_mode_deterministic_counts():
    a = run_bench("velocity_tracking", None, [1, 2], seed=3, steps=4)
    b = run_bench("velocity_tracking", None, [1, 2], seed=3, steps=4)
    assert [r["total_steps"] for r in a] == [r["total_steps"] for r in b]


def test_gen_terrain_zero_amplitude(tmp_path, capsys):
    out = str(tmp_path / "flat.orbh")
    code = main([
        "gen-terrain", "--seed", "3", "--rows", "17", "--cols", "17",
        "--macro-amplitude", "0", "--meso-amplitude", "0",
        "--crater-density", "0", "--out", out,
    ])
    assert code == 0
    raw = open(out, "rb").read()
    assert raw[:4] == b"ORBH"
    rows, cols = struct.unpack("<II", raw[4:12])
    heights = np.frombuffer(raw[20:], dtype="<f4")
    assert (rows, cols) == (17, 17)
    assert np.all(heights == 0.0)


def test_gen_terrain_same_seed_identical(tmp_path, capsys):
    p1, p2 = str(tmp_path / "a.orbh"), str(tmp_path / "b.orbh")
    for p in (p1, p2):
        assert main(["gen-terrain", "--seed", "9", "--rows", "33", "--cols", "33",
                     "--out", p]) == 0
    assert open(p1, "rb").read() == open(p2, "rb").read()


def test_gen_terrain_io_failure(capsys):
    code = main(["gen-terrain", "--seed", "1", "--out", "/nonexistent/dir/x.orbh"])
    assert code == 4


def test_manifest_command(tmp_path, capsys):
    out = str(tmp_path / "m.json")
    code = main(["manifest", "--task", "waypoint_navigation", "--out", out])
    assert code == 0
    data = json.loads(open(out).read())
    assert data["task_id"] == "waypoint_navigation"
    assert data["action"]["dim"] == 2
    assert data["control_rate_hz"] == 50.0


def test_manifest_byte_identical(tmp_path, capsys):
    p1, p2 = str(tmp_path / "m1.json"), str(tmp_path / "m2.json")
    for p in (p1, p2):
        assert main(["manifest", "--task", "landing", "--out", p]) == 0
    assert open(p1, "rb").read() == open(p2, "rb").read()


def test_probe_emits_comparison_table():
    gains, rows = run_probe(tune_seed=7, holdout_seeds=3, episodes=2)
    assert rows[0]["regime"] == "tuning"
    heldout = [r for r in rows if r["regime"] == "heldout"]
    assert len(heldout) == 3
    assert len({r["terrain_seed"] for r in rows}) == 4
    for r in rows:
        assert 0.0 <= r["success_rate"] <= 1.0


def test_hundred_terrains_under_ten_seconds():
    import time

    from orbitbench.rng import RngKey, Stream
    from orbitbench.terrain import TerrainBlueprint, generate_heightfield

    bp = TerrainBlueprint(rows=128, cols=128, extent_x=16.0, extent_y=16.0)
    t0 = time.perf_counter()
    for i in range(100):
        generate_heightfield(bp, RngKey(4, env_index=i, stream_id=Stream.TERRAIN))
    assert time.perf_counter() - t0 < 10.0


def test_run_with_log_writes_jsonl(tmp_path, capsys):
    log = str(tmp_path / "run.jsonl")
    code = main([
        "run", "--task", "velocity_tracking", "--policy", "zero",
        "--episodes", "1", "--seed", "2", "--log", log,
    ])
    assert code == 0
    lines = [json.loads(l) for l in open(log) if l.strip()]
    assert len(lines) == 1000  # default max episode steps
