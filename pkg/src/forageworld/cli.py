"""Command line front-end: single sims, batch experiments, log analysis,
and the live experiment server."""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .config import Condition, ConfigError, SimConfig
from .logio import LogFormatError, read_log
from .runner import run_game
from . import analysis


@dataclass
class BatchSpec:
    """One JSON document describing a full experiment grid."""

    repetitions: int
    conditions: list[Condition]
    strategies: object  # preset name, spec string, or list of them
    n_foragers: int
    seed_base: int
    out_dir: Path
    switch_times: list[float] | None = None
    window_seconds: float = analysis.DEFAULT_WINDOW_SECONDS
    config_overrides: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.n_foragers < 1:
            raise ConfigError("n_foragers must be >= 1")
        if not self.conditions:
            raise ConfigError("batch needs at least one condition")

    @classmethod
    def from_file(cls, path: str | Path) -> "BatchSpec":
        with Path(path).open("r", encoding="utf-8") as fh:
            raw = json.load(fh)
        conditions = raw.get("conditions", "all")
        if conditions == "all":
            from .server import enumerate_conditions
            conds = enumerate_conditions()
        else:
            conds = [Condition.from_code(c) if isinstance(c, str)
                     else Condition.from_dict(c) for c in conditions]
        return cls(
            repetitions=int(raw.get("repetitions", 1)),
            conditions=conds,
            strategies=raw.get("strategies", "random"),
            n_foragers=int(raw.get("n_foragers", 10)),
            seed_base=int(raw.get("seed_base", 0)),
            out_dir=Path(raw.get("out_dir", "runs")),
            switch_times=raw.get("switch_times"),
            window_seconds=float(raw.get("window_seconds",
                                         analysis.DEFAULT_WINDOW_SECONDS)),
            config_overrides=raw.get("config", {}),
        )


def _cell_config(spec: BatchSpec, cond: Condition, cell_index: int) -> SimConfig:
    # XOR derivation keeps every cell independently reproducible.
    kwargs = dict(spec.config_overrides)
    if spec.switch_times:
        kwargs["switch_time_choices"] = tuple(spec.switch_times)
    base = SimConfig(condition=cond, n_foragers=spec.n_foragers,
                     seed=spec.seed_base ^ cell_index)
    return base.with_overrides(**kwargs) if kwargs else base


def run_batch(spec: BatchSpec) -> tuple[list[dict], list[tuple[str, str]]]:
    """Run every (condition x repetition) cell, then analyze the whole set.

    Returns (per-run rows, failures); CSVs land next to the logs.
    """
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for ci, cond in enumerate(spec.conditions):
        for rep in range(spec.repetitions):
            cell_index = ci * spec.repetitions + rep
            cfg = _cell_config(spec, cond, cell_index)
            name = f"{cond.label}_rep{rep:02d}_seed{cfg.seed}.jsonl"
            path = spec.out_dir / name
            run_game(cfg, strategies=spec.strategies, out_path=path)
            paths.append(path)
    return analyze_paths(paths, spec.window_seconds, spec.out_dir)


def analyze_paths(paths: list[Path], window_seconds: float,
                  out_dir: Path) -> tuple[list[dict], list[tuple[str, str]]]:
    """Per-run stats, per-sample series, and per-condition aggregates as CSV.

    Unreadable or too-short logs are reported and skipped; the rest proceed.
    """
    rows = []
    failures = []
    for path in paths:
        try:
            log = read_log(path)
            rows.append(analysis.analyze_log(log, run_id=Path(path).stem,
                                             window_seconds=window_seconds))
        except (LogFormatError, ValueError, OSError) as e:
            failures.append((str(path), str(e)))
    out_dir.mkdir(parents=True, exist_ok=True)
    if rows:
        analysis.write_runs_csv(rows, out_dir / "runs.csv")
        analysis.write_series_csv(rows, out_dir / "series.csv")
        analysis.write_aggregate_csv(rows, out_dir / "aggregate.csv")
    return rows, failures


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="forageworld",
        description="Two-pool group-foraging experiments: simulate, analyze, serve.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("sim", help="run one headless game")
    sim.add_argument("--players", type=int, default=10)
    sim.add_argument("--strategy", action="append", default=None,
                     help="preset name or 'preset:w_dist=0.2,...'; repeat to "
                          "cycle strategies over foragers")
    sim.add_argument("--condition", default="110",
                     help="three 0/1 chars: food, foragers, success (default 110)")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--switch-at", type=float, default=None,
                     help="fix the switch time instead of drawing one")
    sim.add_argument("--game-seconds", type=float, default=None)
    sim.add_argument("--out", type=Path, required=True)

    batch = sub.add_parser("batch", help="run a full experiment grid")
    batch.add_argument("--spec", type=Path, required=True,
                       help="JSON batch spec file")

    an = sub.add_parser("analyze", help="summarize existing logs to CSV")
    an.add_argument("paths", nargs="+", type=Path,
                    help="log files or directories of .jsonl logs")
    an.add_argument("--window", type=float, default=analysis.DEFAULT_WINDOW_SECONDS)
    an.add_argument("--out-dir", type=Path, default=Path("analysis_out"))

    # flags win over FORAGEWORLD_* environment variables
    env = os.environ
    srv = sub.add_parser("serve", help="run the live experiment server")
    srv.add_argument("--port", type=int,
                     default=int(env.get("FORAGEWORLD_PORT", 8000)))
    srv.add_argument("--host", default=env.get("FORAGEWORLD_HOST", "127.0.0.1"))
    srv.add_argument("--seed", type=int,
                     default=int(env.get("FORAGEWORLD_SEED", 0)),
                     help="deployment seed for session schedules")
    srv.add_argument("--schedule", type=Path,
                     default=(Path(env["FORAGEWORLD_SCHEDULE"])
                              if "FORAGEWORLD_SCHEDULE" in env else None),
                     help="JSON file fixing the game schedule for every session")
    srv.add_argument("--log-dir", type=Path,
                     default=Path(env.get("FORAGEWORLD_LOG_DIR", "server_logs")))
    return p


def _cmd_sim(args) -> int:
    try:
        condition = Condition.from_code(args.condition)
        kwargs = {}
        if args.switch_at is not None:
            kwargs["switch_time_choices"] = (args.switch_at,)
        if args.game_seconds is not None:
            kwargs["game_seconds"] = args.game_seconds
        cfg = SimConfig(condition=condition, n_foragers=args.players,
                        seed=args.seed, **kwargs)
        strategies = args.strategy if args.strategy else "random"
        result = run_game(cfg, strategies=strategies, out_path=args.out)
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    scores = sorted((f.total_collected for f in result.state.foragers), reverse=True)
    print(f"wrote {result.path} (top score {scores[0] if scores else 0})")
    return 0


def _cmd_batch(args) -> int:
    try:
        spec = BatchSpec.from_file(args.spec)
        rows, failures = run_batch(spec)
    except (ConfigError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"{len(rows)} runs analyzed -> {spec.out_dir}")
    for path, err in failures:
        print(f"failed: {path}: {err}", file=sys.stderr)
    return 1 if failures else 0


def _expand_log_paths(paths: list[Path]) -> list[Path]:
    out = []
    for p in paths:
        if p.is_dir():
            out.extend(sorted(p.glob("*.jsonl")))
        else:
            out.append(p)
    return out


def _cmd_analyze(args) -> int:
    paths = _expand_log_paths(args.paths)
    if not paths:
        print("error: no logs found", file=sys.stderr)
        return 1
    rows, failures = analyze_paths(paths, args.window, args.out_dir)
    print(f"{len(rows)} runs analyzed -> {args.out_dir}")
    for path, err in failures:
        print(f"failed: {path}: {err}", file=sys.stderr)
    return 1 if failures else 0


def _cmd_serve(args) -> int:
    import uvicorn
    from .server import create_app

    app = create_app(deployment_seed=args.seed, log_dir=args.log_dir,
                     schedule_path=args.schedule)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "sim": _cmd_sim,
        "batch": _cmd_batch,
        "analyze": _cmd_analyze,
        "serve": _cmd_serve,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
