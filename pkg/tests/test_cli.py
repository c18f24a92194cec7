import csv
import json

import pytest

from forageworld.cli import BatchSpec, main, run_batch
from forageworld import Condition, ConfigError


FAST_WORLD = {
    "tick_seconds": 0.05,
    "game_seconds": 40.0,
    "world_width": 24,
    "world_height": 24,
    "pool_radius": 3,
    "min_pool_distance": 11,
    "membership_radius": 5,
}


def write_spec(tmp_path, **overrides):
    spec = {
        "repetitions": 2,
        "conditions": ["110", "010"],
        "strategies": "food_greedy",
        "n_foragers": 3,
        "seed_base": 64,
        "out_dir": str(tmp_path / "runs"),
        "switch_times": [20.0],
        "window_seconds": 15.0,
        "config": FAST_WORLD,
    }
    spec.update(overrides)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_sim_writes_log(tmp_path, capsys):
    out = tmp_path / "one.jsonl"
    rc = main(["sim", "--players", "3", "--seed", "7", "--condition", "110",
               "--switch-at", "20", "--game-seconds", "40", "--out", str(out)])
    assert rc == 0
    assert out.exists()
    first = json.loads(out.read_text().splitlines()[0])
    assert first["kind"] == "config"
    assert first["seed"] == 7
    assert first["switch_time_choices"] == [20.0]


def test_sim_rejects_bad_condition(tmp_path):
    rc = main(["sim", "--condition", "abc", "--out", str(tmp_path / "x.jsonl")])
    assert rc == 1


def test_batch_shapes_and_seeds(tmp_path):
    spec = BatchSpec.from_file(write_spec(tmp_path))
    rows, failures = run_batch(spec)
    assert failures == []
    assert len(rows) == 4  # 2 conditions x 2 repetitions

    runs = read_csv(tmp_path / "runs" / "runs.csv")
    assert runs[0] == ["run_id", "condition", "switch_time", "pre_mean",
                       "post_mean", "delta", "undermatching_index", "gini",
                       "efficiency"]
    assert len(runs) == 5

    agg = read_csv(tmp_path / "runs" / "aggregate.csv")
    assert len(agg) == 3  # header + one row per condition

    # cell seeds are base xor flat index
    logs = sorted(p.name for p in (tmp_path / "runs").glob("*.jsonl"))
    assert len(logs) == 4
    expected = {64 ^ 0, 64 ^ 1, 64 ^ 2, 64 ^ 3}
    seeds = {int(name.rsplit("seed", 1)[1].split(".")[0]) for name in logs}
    assert seeds == expected


def test_batch_is_deterministic(tmp_path):
    spec_path = write_spec(tmp_path)
    rc = main(["batch", "--spec", str(spec_path)])
    assert rc == 0
    first = {p.name: p.read_bytes()
             for p in (tmp_path / "runs").glob("*.*")}
    rc = main(["batch", "--spec", str(spec_path)])
    assert rc == 0
    second = {p.name: p.read_bytes()
              for p in (tmp_path / "runs").glob("*.*")}
    assert first == second


def test_analyze_directory(tmp_path):
    spec_path = write_spec(tmp_path)
    assert main(["batch", "--spec", str(spec_path)]) == 0
    out_dir = tmp_path / "reanalysis"
    rc = main(["analyze", str(tmp_path / "runs"), "--window", "15",
               "--out-dir", str(out_dir)])
    assert rc == 0
    assert (out_dir / "runs.csv").exists()
    assert (out_dir / "series.csv").exists()
    assert (out_dir / "aggregate.csv").exists()


def test_analyze_reports_bad_logs_but_continues(tmp_path, capsys):
    spec_path = write_spec(tmp_path)
    assert main(["batch", "--spec", str(spec_path)]) == 0
    bad = tmp_path / "runs" / "zz_broken.jsonl"
    bad.write_text("this is not json\n")
    rc = main(["analyze", str(tmp_path / "runs"),
               "--out-dir", str(tmp_path / "out2")])
    captured = capsys.readouterr()
    assert rc == 1
    assert "zz_broken" in captured.err
    assert "4 runs analyzed" in captured.out


def test_analyze_window_too_long_fails_that_file(tmp_path, capsys):
    spec_path = write_spec(tmp_path)
    assert main(["batch", "--spec", str(spec_path)]) == 0
    rc = main(["analyze", str(tmp_path / "runs"), "--window", "500",
               "--out-dir", str(tmp_path / "out3")])
    assert rc == 1
    assert "0 runs analyzed" in capsys.readouterr().out


def test_spec_validation():
    with pytest.raises(ConfigError):
        BatchSpec(repetitions=0, conditions=[Condition(True, True, False)],
                  strategies="random", n_foragers=3, seed_base=0,
                  out_dir=None)
    with pytest.raises(ConfigError):
        BatchSpec(repetitions=1, conditions=[], strategies="random",
                  n_foragers=3, seed_base=0, out_dir=None)


def test_strategy_override_parsing():
    from forageworld.runner import parse_strategy

    p = parse_strategy("food_greedy:w_dist=0.3,temperature=0.5")
    assert p.w_food == 1.0
    assert p.w_dist == 0.3
    assert p.temperature == 0.5

    bare = parse_strategy("w_soc=2,w_dist=0.2")
    assert bare.w_soc == 2.0

    with pytest.raises(ValueError):
        parse_strategy("food_greedy:nope=1")
    with pytest.raises(ValueError):
        parse_strategy("not_a_preset")


def test_serve_env_fallbacks(monkeypatch, tmp_path):
    from forageworld.cli import _build_parser

    sched = tmp_path / "sched.json"
    sched.write_text("[]")
    monkeypatch.setenv("FORAGEWORLD_PORT", "9123")
    monkeypatch.setenv("FORAGEWORLD_SEED", "77")
    monkeypatch.setenv("FORAGEWORLD_SCHEDULE", str(sched))
    args = _build_parser().parse_args(["serve"])
    assert args.port == 9123
    assert args.seed == 77
    assert args.schedule == sched
    # explicit flags still win
    args = _build_parser().parse_args(["serve", "--port", "9200"])
    assert args.port == 9200


def test_per_forager_strategy_assignment():
    from forageworld.runner import resolve_strategies

    mixed = resolve_strategies(["food_greedy", "scrounger"], 4)
    assert mixed["f0"].w_food == 1.0
    assert mixed["f1"].w_succ == 1.0
    assert mixed["f2"].w_food == 1.0
    assert mixed["f3"].w_succ == 1.0
