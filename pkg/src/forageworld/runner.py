"""Headless game driver: seeded agents in, JSONL log out."""
from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

from .agents import AgentMemory, StrategyParams, decide_action, preset, update_memory
from .config import SimConfig, config_warnings, validate_config
from .core import Action, EnvState, build_views, init_game, snapshot, step_tick
from .logio import LogWriter

# Per-forager action override for scripted runs: (state, views) -> actions.
ActionsFn = Callable[[EnvState, dict], dict[str, Action]]


@dataclass
class RunResult:
    state: EnvState
    path: Path | None
    records: list[dict]


def resolve_strategies(spec, n_foragers: int,
                       ids: list[str] | None = None) -> dict[str, StrategyParams]:
    """Expand a strategy spec to one StrategyParams per forager id.

    Accepts a preset name, a StrategyParams, a list of either (cycled over
    foragers), or a dict keyed by forager id.
    """
    ids = ids or [f"f{i}" for i in range(n_foragers)]
    if isinstance(spec, Mapping):
        missing = [i for i in ids if i not in spec]
        if missing:
            raise ValueError(f"strategy dict missing foragers {missing}")
        return {i: _as_params(spec[i]) for i in ids}
    if isinstance(spec, (list, tuple)):
        if not spec:
            raise ValueError("empty strategy list")
        return {fid: _as_params(spec[i % len(spec)]) for i, fid in enumerate(ids)}
    return {fid: _as_params(spec) for fid in ids}


def _as_params(item) -> StrategyParams:
    if isinstance(item, StrategyParams):
        return item
    if isinstance(item, str):
        return parse_strategy(item)
    raise TypeError(f"cannot interpret strategy {item!r}")


def parse_strategy(text: str) -> StrategyParams:
    """Parse "preset" or "preset:key=val,key=val" or bare "key=val,..." specs."""
    text = text.strip()
    base, _, rest = text.partition(":")
    if "=" in base:
        rest, base = text, ""
    params = preset(base) if base else StrategyParams()
    overrides = {}
    if rest:
        for pair in rest.split(","):
            key, _, val = pair.partition("=")
            key = key.strip()
            if not hasattr(params, key) or key == "color_values":
                raise ValueError(f"unknown strategy parameter {key!r}")
            overrides[key] = float(val)
    for key, val in overrides.items():
        setattr(params, key, val)
    params.__post_init__()  # re-check invariants after overrides
    return params


def run_game(cfg: SimConfig,
             strategies=None,
             out_path: str | Path | None = None,
             actions_fn: ActionsFn | None = None,
             keep_records: bool = False) -> RunResult:
    """Run one full seeded game and log it.

    Agents decide from the previous tick's views; their memories update from
    the views after each step, so decisions never peek past the information
    condition.
    """
    validate_config(cfg)
    state = init_game(cfg)

    agent_params: dict[str, StrategyParams] = {}
    memories: dict[str, AgentMemory] = {}
    agent_rngs: dict[str, random.Random] = {}
    if actions_fn is None:
        agent_params = resolve_strategies(strategies or "random", cfg.n_foragers,
                                          [f.id for f in state.foragers])
        for f in state.foragers:
            memories[f.id] = AgentMemory()
            agent_rngs[f.id] = random.Random(f"{cfg.seed}:{f.id}")

    with LogWriter(out_path, keep_records=keep_records) as writer:
        writer.write_config(cfg)
        for msg in config_warnings(cfg):
            writer.write_warning(msg, tick=0, t=0.0)
        rec = snapshot(state, cfg)
        if rec:
            writer.write(rec)

        views = build_views(state, cfg)
        for _ in range(cfg.total_ticks):
            if actions_fn is not None:
                actions = actions_fn(state, views)
            else:
                actions = {
                    f.id: decide_action(views[f.id], memories[f.id],
                                        agent_params[f.id], agent_rngs[f.id])
                    for f in state.foragers
                }
            state, events = step_tick(state, cfg, actions)
            writer.write_events(events)
            rec = snapshot(state, cfg)
            if rec:
                writer.write(rec)

            views = build_views(state, cfg)
            if actions_fn is None:
                collected = {ev["id"]: ev["pellets"]
                             for ev in events if ev["kind"] == "collect"}
                for f in state.foragers:
                    update_memory(memories[f.id], views[f.id],
                                  collected.get(f.id, 0), agent_params[f.id])

        return RunResult(state=state, path=writer.path, records=writer.records)
