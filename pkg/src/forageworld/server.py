"""Authoritative live experiment server.

One asyncio tick loop per session drives the same state machine as headless
runs, samples each participant's latest held direction at tick boundaries,
sends every participant exactly its own filtered view, and writes logs that
are schema-identical to headless ones.
"""
from __future__ import annotations

import asyncio
import itertools
import json
import random
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect

from .config import Condition, ConfigError, SimConfig, ICONS, config_warnings, validate_config
from .core import Action, ObserverView, build_views, init_game, snapshot, step_tick
from .logio import LogWriter, dumps_record


class SessionError(RuntimeError):
    """A session operation is not valid in the current lifecycle state."""


DIRECTIONS = {
    "up": Action.UP,
    "down": Action.DOWN,
    "left": Action.LEFT,
    "right": Action.RIGHT,
}


def enumerate_conditions() -> list[Condition]:
    """All information-toggle triples except the two that pair invisible
    foragers with success indication."""
    out = []
    for food, foragers, success in itertools.product((True, False), repeat=3):
        if success and not foragers:
            continue
        out.append(Condition(food, foragers, success))
    return out


def build_schedule(conditions: list[Condition], switch_choices: list[float],
                   rng: random.Random, rotation: int = 0,
                   ) -> list[tuple[Condition, float]]:
    """Seeded random condition order; switch times assigned round-robin from
    `rotation` so pairings balance across sessions of one deployment."""
    if not conditions or not switch_choices:
        raise ValueError("conditions and switch_choices must be non-empty")
    order = rng.sample(list(conditions), len(conditions))
    times = [switch_choices[(rotation + i) % len(switch_choices)]
             for i in range(len(order))]
    return list(zip(order, times))


@dataclass
class Participant:
    id: str
    name: str
    icon: str
    connected: bool = True


@dataclass
class InputFrame:
    participant_id: str
    direction: Action | None
    client_ts: float | None = None


@dataclass
class GameRecord:
    index: int
    condition: Condition
    switch_time: float
    seed: int
    path: Path
    completed: bool = False


class Session:
    def __init__(self, session_id: str, seed: int,
                 schedule: list[tuple[Condition, float]],
                 log_dir: Path, config_overrides: dict | None = None):
        self.id = session_id
        self.seed = seed
        self.schedule = schedule
        self.log_dir = log_dir / session_id
        self.config_overrides = config_overrides or {}
        self.state = "lobby"
        self.roster: dict[str, Participant] = {}
        self.sockets: dict[str, WebSocket] = {}
        self.mailbox: dict[str, Action | None] = {}
        self.games: list[GameRecord] = []
        self.game_index = 0
        self.rng = random.Random(f"{seed}:{session_id}")
        self.abort_requested = False
        self.task: asyncio.Task | None = None
        # Written by socket handlers, drained into the log by the tick loop
        # so records stay ordered by tick.
        self.pending_warnings: list[str] = []

    def game_config(self, index: int) -> SimConfig:
        condition, switch_time = self.schedule[index]
        cfg = SimConfig(condition=condition,
                        n_foragers=len(self.roster),
                        seed=self.seed ^ index,
                        switch_time_choices=(switch_time,))
        if self.config_overrides:
            cfg = cfg.with_overrides(**self.config_overrides)
        return cfg

    def status(self) -> dict:
        return {
            "session_id": self.id,
            "state": self.state,
            "game_index": self.game_index,
            "n_games": len(self.schedule),
            "roster": [
                {"id": p.id, "name": p.name, "icon": p.icon,
                 "connected": p.connected}
                for p in self.roster.values()
            ],
            "schedule": [
                {"condition": cond.to_dict(), "switch_time": st}
                for cond, st in self.schedule
            ],
        }


def join(session: Session, name: str) -> tuple[str, str]:
    """Add a participant while the session is still in the lobby; returns the
    assigned (id, icon). Icons are drawn randomly without replacement."""
    if session.state != "lobby":
        raise SessionError(f"cannot join a session in state {session.state!r}")
    taken = {p.icon for p in session.roster.values()}
    available = [icon for icon in ICONS if icon not in taken]
    if not available:
        raise SessionError("icon pool exhausted")
    icon = available[session.rng.randrange(len(available))]
    pid = f"p{len(session.roster)}"
    session.roster[pid] = Participant(id=pid, name=name, icon=icon)
    session.mailbox[pid] = None
    return pid, icon


def ingest_input(session: Session, frame: InputFrame) -> None:
    """Record the participant's latest held direction; last write wins
    between ticks."""
    if session.state != "running":
        raise SessionError("no game is running")
    if frame.participant_id not in session.roster:
        raise SessionError(f"unknown participant {frame.participant_id!r}")
    session.mailbox[frame.participant_id] = frame.direction


def export_logs(session: Session) -> list[Path]:
    """Paths of completed game logs; partial (aborted) logs are kept on disk
    with a _partial suffix but not returned."""
    completed = [g.path for g in session.games if g.completed]
    if not completed:
        raise SessionError("no completed games")
    return completed


def serialize_view(view: ObserverView, cfg: SimConfig) -> dict:
    me = next(f for f in view.foragers if f.id == view.observer_id)
    return {
        "type": "view",
        "t": cfg.t_of(view.tick),
        "self": {"id": me.id, "icon": me.icon, "x": me.x, "y": me.y,
                 "color": me.color},
        "food": [[x, y, c] for x, y, c in view.food],
        "markers": [[x, y] for x, y in view.markers],
        "foragers": [{"id": f.id, "icon": f.icon, "x": f.x, "y": f.y,
                      "color": f.color} for f in view.foragers],
        "score": view.total_collected,
    }


async def _send(session: Session, pid: str, payload: dict) -> None:
    ws = session.sockets.get(pid)
    if ws is None:
        return
    try:
        await ws.send_text(dumps_record(payload))
    except Exception:
        _mark_disconnected(session, pid)


async def _broadcast(session: Session, payload: dict) -> None:
    for pid in list(session.sockets):
        await _send(session, pid, payload)


def _mark_disconnected(session: Session, pid: str) -> None:
    if pid in session.sockets:
        del session.sockets[pid]
    participant = session.roster.get(pid)
    if participant and participant.connected:
        participant.connected = False
        session.mailbox[pid] = None
        if session.state == "running":
            session.pending_warnings.append(f"participant {pid} disconnected")


async def run_game(session: Session, cfg: SimConfig) -> GameRecord:
    """Drive one game at real-time cadence and persist its log.

    The loop samples the input mailbox once per tick, steps the world, sends
    each participant its own view, and sleeps until the next tick boundary
    (catching up without sleeping when behind).
    """
    if not any(p.connected for p in session.roster.values()):
        raise SessionError("no connected participants")
    validate_config(cfg)

    index = session.game_index
    _, switch_time = session.schedule[index]
    name = f"game{index}_{cfg.condition.label}_seed{cfg.seed}.jsonl"
    record = GameRecord(index=index, condition=cfg.condition,
                        switch_time=switch_time, seed=cfg.seed,
                        path=session.log_dir / name)
    session.games.append(record)
    session.state = "running"
    session.abort_requested = False
    for pid in session.mailbox:
        session.mailbox[pid] = None

    roster = [(p.id, p.icon) for p in session.roster.values()]
    state = init_game(cfg, roster=roster)
    aborted = False

    with LogWriter(record.path) as writer:
        writer.write_config(cfg)
        for msg in config_warnings(cfg):
            writer.write_warning(msg, tick=0, t=0.0)
        rec = snapshot(state, cfg)
        if rec:
            writer.write(rec)

        await _broadcast(session, {
            "type": "game_start",
            "game_index": index,
            "game_seconds": cfg.game_seconds,
            "tick_seconds": cfg.tick_seconds,
            "world": {"width": cfg.world_width, "height": cfg.world_height},
            "condition": cfg.condition.to_dict(),
        })

        loop = asyncio.get_running_loop()
        start = loop.time()
        for i in range(cfg.total_ticks):
            if session.abort_requested:
                aborted = True
                writer.write_warning("game aborted by operator",
                                     tick=state.tick, t=cfg.t_of(state.tick))
                break
            # All inputs sampled at the same instant, once per tick.
            actions = dict(session.mailbox)
            state, events = step_tick(state, cfg, actions)
            for msg in session.pending_warnings:
                writer.write_warning(msg, tick=state.tick, t=cfg.t_of(state.tick))
            session.pending_warnings.clear()
            writer.write_events(events)
            rec = snapshot(state, cfg)
            if rec:
                writer.write(rec)

            views = build_views(state, cfg)
            for pid in list(session.sockets):
                await _send(session, pid, serialize_view(views[pid], cfg))

            delay = start + (i + 1) * cfg.tick_seconds - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)

    if aborted:
        partial = record.path.with_name(record.path.stem + "_partial.jsonl")
        record.path.rename(partial)
        record.path = partial
        await _broadcast(session, {"type": "game_over", "aborted": True,
                                   "scores": []})
    else:
        record.completed = True
        scores = sorted(
            ({"id": f.id, "name": session.roster[f.id].name,
              "icon": f.icon, "score": f.total_collected}
             for f in state.foragers),
            key=lambda s: (-s["score"], s["id"]),
        )
        await _broadcast(session, {"type": "game_over", "scores": scores})

    session.game_index += 1
    session.state = ("finished" if session.game_index >= len(session.schedule)
                     else "between_games")
    return record


class SessionManager:
    def __init__(self, deployment_seed: int, log_dir: Path,
                 fixed_schedule: list[tuple[Condition, float]] | None = None,
                 config_overrides: dict | None = None):
        self.deployment_seed = deployment_seed
        self.log_dir = log_dir
        self.fixed_schedule = fixed_schedule
        self.config_overrides = config_overrides or {}
        self.sessions: dict[str, Session] = {}
        self.counter = 0  # also the switch-time rotation across sessions

    def create_session(self, seed: int | None = None,
                       conditions: list[Condition] | None = None,
                       switch_times: list[float] | None = None,
                       config_overrides: dict | None = None) -> Session:
        index = self.counter
        self.counter += 1
        session_id = f"s{index:04d}"
        session_seed = self.deployment_seed ^ (index + 1) if seed is None else seed
        if self.fixed_schedule is not None:
            schedule = list(self.fixed_schedule)
        else:
            from .config import DEFAULT_SWITCH_TIMES
            schedule = build_schedule(
                conditions or enumerate_conditions(),
                list(switch_times or DEFAULT_SWITCH_TIMES),
                random.Random(f"{session_seed}:schedule"),
                rotation=index,
            )
        overrides = dict(self.config_overrides)
        overrides.update(config_overrides or {})
        session = Session(session_id, session_seed, schedule, self.log_dir,
                          config_overrides=overrides)
        self.sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        return self.sessions.get(session_id)


def load_schedule_file(path: Path) -> list[tuple[Condition, float]]:
    with path.open("r", encoding="utf-8") as fh:
        raw = json.load(fh)
    out = []
    for entry in raw:
        cond = entry["condition"]
        condition = (Condition.from_code(cond) if isinstance(cond, str)
                     else Condition.from_dict(cond))
        out.append((condition, float(entry["switch_time"])))
    return out


def create_app(deployment_seed: int = 0, log_dir: Path | str = "server_logs",
               schedule_path: Path | None = None,
               config_overrides: dict | None = None) -> FastAPI:
    fixed = load_schedule_file(schedule_path) if schedule_path else None
    manager = SessionManager(deployment_seed, Path(log_dir),
                             fixed_schedule=fixed,
                             config_overrides=config_overrides)
    app = FastAPI(title="forageworld experiment server")
    app.state.manager = manager

    @app.post("/api/sessions")
    async def create_session(body: dict | None = None):
        body = body or {}
        try:
            conditions = None
            if "conditions" in body:
                conditions = [Condition.from_code(c) if isinstance(c, str)
                              else Condition.from_dict(c)
                              for c in body["conditions"]]
            session = manager.create_session(
                seed=body.get("seed"),
                conditions=conditions,
                switch_times=body.get("switch_times"),
                config_overrides=body.get("config"),
            )
        except (ConfigError, ValueError) as e:
            raise HTTPException(status_code=422, detail=str(e))
        return session.status()

    @app.get("/api/sessions/{session_id}")
    async def session_status(session_id: str):
        session = manager.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session.status()

    @app.get("/api/sessions/{session_id}/logs")
    async def list_logs(session_id: str):
        session = manager.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return {
            "completed": [g.path.name for g in session.games if g.completed],
            "partial": [g.path.name for g in session.games if not g.completed],
        }

    @app.get("/api/sessions/{session_id}/logs/{name}")
    async def download_log(session_id: str, name: str):
        from fastapi.responses import PlainTextResponse

        session = manager.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        for g in session.games:
            if g.path.name == name:
                return PlainTextResponse(g.path.read_text(encoding="utf-8"))
        raise HTTPException(status_code=404, detail="unknown log")

    @app.websocket("/ws/{session_id}")
    async def websocket_endpoint(websocket: WebSocket, session_id: str):
        session = manager.get(session_id)
        if session is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        pid: str | None = None
        try:
            while True:
                try:
                    msg = json.loads(await websocket.receive_text())
                except json.JSONDecodeError:
                    await websocket.send_text(dumps_record(
                        {"type": "error", "message": "not valid JSON"}))
                    continue
                pid = await _handle_message(session, websocket, msg, pid)
        except WebSocketDisconnect:
            if pid is not None:
                _mark_disconnected(session, pid)

    return app


async def _error(websocket: WebSocket, message: str) -> None:
    await websocket.send_text(dumps_record({"type": "error", "message": message}))


async def _handle_message(session: Session, websocket: WebSocket,
                          msg: dict, pid: str | None) -> str | None:
    """Dispatch one client frame; returns the (possibly updated) participant
    id bound to this socket."""
    kind = msg.get("type")
    if kind == "join":
        try:
            pid, icon = join(session, str(msg.get("name", "anonymous")))
        except SessionError as e:
            await _error(websocket, str(e))
            return pid
        session.sockets[pid] = websocket
        await websocket.send_text(dumps_record(
            {"type": "joined", "id": pid, "icon": icon}))
        await _broadcast(session, {
            "type": "lobby",
            "players": [{"id": p.id, "name": p.name, "icon": p.icon}
                        for p in session.roster.values()],
        })
    elif kind == "input":
        direction = msg.get("dir")
        action = DIRECTIONS.get(direction) if direction else None
        if direction and action is None:
            await _error(websocket, f"unknown direction {direction!r}")
            return pid
        if pid is None:
            await _error(websocket, "join before sending input")
            return pid
        try:
            ingest_input(session, InputFrame(pid, action, msg.get("ts")))
        except SessionError as e:
            await _error(websocket, str(e))
    elif kind == "start_game":
        if session.state not in ("lobby", "between_games"):
            await _error(websocket, f"cannot start in state {session.state!r}")
            return pid
        if session.game_index >= len(session.schedule):
            await _error(websocket, "schedule exhausted")
            return pid
        if not any(p.connected for p in session.roster.values()):
            await _error(websocket, "no connected participants")
            return pid
        try:
            cfg = session.game_config(session.game_index)
            validate_config(cfg)
        except (ConfigError, ValueError) as e:
            await _error(websocket, str(e))
            return pid
        session.state = "running"  # claimed now so a second start is rejected
        session.task = asyncio.create_task(run_game(session, cfg))
    elif kind == "abort":
        if session.state == "running":
            session.abort_requested = True
        else:
            await _error(websocket, "no game running")
    else:
        await _error(websocket, f"unknown message type {kind!r}")
    return pid
