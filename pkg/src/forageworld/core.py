"""World state machine: pool placement, food inflow, the mid-game switch,
movement, collection, success coloring, and per-observer view filtering."""
from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .config import SimConfig, ICONS, pool_margin

Cell = tuple[int, int]

PURPLE = "purple"
BLUE = "blue"
YELLOW = "yellow"
ORANGE = "orange"
RED = "red"

MAX_PLACEMENT_ATTEMPTS = 10_000


class PlacementError(RuntimeError):
    """Pool geometry cannot be satisfied on this grid."""


class Action(Enum):
    UP = "up"
    DOWN = "down"
    LEFT = "left"
    RIGHT = "right"
    STAY = "stay"


# Grid is y-up: UP increases y, RIGHT increases x. No wrapping.
ACTION_DELTAS = {
    Action.UP: (0, 1),
    Action.DOWN: (0, -1),
    Action.LEFT: (-1, 0),
    Action.RIGHT: (1, 0),
    Action.STAY: (0, 0),
}


@dataclass
class Marker:
    """Private trace of a collected pellet, shown only to its owner."""

    x: int
    y: int
    owner: str
    expiry_tick: int


@dataclass
class ForagerState:
    id: str
    icon: str
    position: Cell
    total_collected: int = 0
    # (tick, pellets) pairs, pruned to the trailing success window.
    collection_log: deque = field(default_factory=deque)
    color: str = PURPLE


@dataclass
class EnvState:
    tick: int
    pool_centers: tuple[Cell, Cell]
    rich_pool: int
    food: dict[Cell, int]
    foragers: list[ForagerState]
    markers: list[Marker]
    switch_time: float
    switched: bool
    rng: random.Random
    # Cached in-grid cells of each pool disk; centers never move.
    pool_cells: tuple[list[Cell], list[Cell]] = ((), ())

    def forager(self, forager_id: str) -> ForagerState:
        for f in self.foragers:
            if f.id == forager_id:
                return f
        raise KeyError(f"unknown forager {forager_id!r}")

    @property
    def initial_rich_pool(self) -> int:
        return 1 - self.rich_pool if self.switched else self.rich_pool


@dataclass
class ViewForager:
    id: str
    icon: str
    x: int
    y: int
    color: str


@dataclass
class ObserverView:
    """Exactly what one observer is allowed to see at one instant."""

    observer_id: str
    tick: int
    width: int
    height: int
    position: Cell
    total_collected: int
    food: list[tuple[int, int, int]]       # (x, y, count), sorted by cell
    markers: list[Cell]                    # own unexpired markers only
    foragers: list[ViewForager]            # always contains self
    # Scratch shared between same-tick views so agents can reuse derived
    # arrays; carries no information beyond the fields above.
    shared_cache: dict = field(default_factory=dict, repr=False, compare=False)


def success_color(pellets_in_window: int) -> str:
    """Map a trailing-window pellet count to the indicator color."""
    if pellets_in_window < 0:
        raise ValueError("pellet count must be non-negative")
    if pellets_in_window <= 5:
        return BLUE
    if pellets_in_window <= 10:
        return YELLOW
    if pellets_in_window <= 15:
        return ORANGE
    return RED


def _dist2(a: Cell, b: Cell) -> float:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return dx * dx + dy * dy


def disk_cells(center: Cell, radius: float, width: int, height: int) -> list[Cell]:
    """In-grid cells within Euclidean `radius` of `center`, inclusive, sorted."""
    r = math.ceil(radius)
    r2 = radius * radius
    cx, cy = center
    out = []
    for x in range(max(0, cx - r), min(width, cx + r + 1)):
        for y in range(max(0, cy - r), min(height, cy + r + 1)):
            if (x - cx) ** 2 + (y - cy) ** 2 <= r2:
                out.append((x, y))
    return out


def place_pools(rng: random.Random, cfg: SimConfig) -> tuple[Cell, Cell]:
    """Draw two pool centers uniformly among in-margin pairs separated by at
    least min_pool_distance, by rejection sampling."""
    margin = pool_margin(cfg)
    x_hi = cfg.world_width - 1 - margin
    y_hi = cfg.world_height - 1 - margin
    if x_hi < margin or y_hi < margin:
        raise PlacementError(
            f"grid {cfg.world_width}x{cfg.world_height} too small for pool "
            f"radius {cfg.pool_radius:g}"
        )
    max_sep2 = (x_hi - margin) ** 2 + (y_hi - margin) ** 2
    min_d2 = cfg.min_pool_distance ** 2
    if max_sep2 < min_d2:
        raise PlacementError(
            f"no in-margin pair can be {cfg.min_pool_distance:g} apart on a "
            f"{cfg.world_width}x{cfg.world_height} grid"
        )
    for _ in range(MAX_PLACEMENT_ATTEMPTS):
        c1 = (rng.randint(margin, x_hi), rng.randint(margin, y_hi))
        c2 = (rng.randint(margin, x_hi), rng.randint(margin, y_hi))
        if _dist2(c1, c2) >= min_d2:
            return c1, c2
    raise PlacementError("pool placement did not converge")


def _generate_icons(rng: random.Random, n: int) -> list[str]:
    if n <= len(ICONS):
        return rng.sample(ICONS, n)
    # More foragers than stock icons: suffix repeats to keep them distinct.
    base = list(ICONS)
    out = []
    for i in range(n):
        name = base[i % len(base)]
        out.append(name if i < len(base) else f"{name}-{i // len(base) + 1}")
    return out


def init_game(cfg: SimConfig, roster: list[tuple[str, str]] | None = None) -> EnvState:
    """Build the tick-0 world from a validated config.

    `roster` optionally fixes forager (id, icon) pairs, e.g. for live
    participants; by default ids f0..fN-1 get randomly drawn distinct icons.
    """
    rng = random.Random(cfg.seed)
    centers = place_pools(rng, cfg)
    rich_pool = rng.randrange(2)
    switch_time = cfg.switch_time_choices[rng.randrange(len(cfg.switch_time_choices))]

    if roster is None:
        icons = _generate_icons(rng, cfg.n_foragers)
        roster = [(f"f{i}", icons[i]) for i in range(cfg.n_foragers)]
    elif len(roster) != cfg.n_foragers:
        raise ValueError(
            f"roster has {len(roster)} entries, config says {cfg.n_foragers}"
        )

    initial_color = BLUE if cfg.condition.success_indicated else PURPLE
    foragers = []
    for fid, icon in roster:
        pos = (rng.randrange(cfg.world_width), rng.randrange(cfg.world_height))
        foragers.append(ForagerState(id=fid, icon=icon, position=pos,
                                     color=initial_color))

    pool_cells = tuple(
        disk_cells(c, cfg.pool_radius, cfg.world_width, cfg.world_height)
        for c in centers
    )
    return EnvState(
        tick=0,
        pool_centers=centers,
        rich_pool=rich_pool,
        food={},
        foragers=foragers,
        markers=[],
        switch_time=switch_time,
        switched=False,
        rng=rng,
        pool_cells=pool_cells,
    )


def _ensure_pool_cells(state: EnvState, cfg: SimConfig) -> None:
    if not state.pool_cells[0]:
        state.pool_cells = tuple(
            disk_cells(c, cfg.pool_radius, cfg.world_width, cfg.world_height)
            for c in state.pool_centers
        )


def spawn_food_tick(state: EnvState, cfg: SimConfig, rng: random.Random) -> list[dict]:
    """One Bernoulli spawn trial per pool: the rich pool first, then the poor.

    A successful trial drops one pellet on a uniformly chosen in-grid cell of
    that pool's disk; pellets stack. Returns the spawn events. Probabilities
    are clamped at 1.
    """
    _ensure_pool_cells(state, cfg)
    events = []
    t = cfg.t_of(state.tick)
    trials = (
        (state.rich_pool, cfg.spawn_p_rich, True),
        (1 - state.rich_pool, cfg.spawn_p_poor, False),
    )
    for pool, p, is_rich in trials:
        if p > 0 and rng.random() < p:
            cells = state.pool_cells[pool]
            x, y = cells[rng.randrange(len(cells))]
            state.food[(x, y)] = state.food.get((x, y), 0) + 1
            events.append({"kind": "spawn", "tick": state.tick, "t": t,
                           "pool": pool, "x": x, "y": y, "rich": is_rich})
    return events


def apply_switch(state: EnvState, cfg: SimConfig) -> EnvState:
    """Flip which pool is rich once the clock reaches the switch time.

    Food already on the ground is untouched, and the flip is idempotent.
    """
    if not state.switched and state.tick >= cfg.switch_tick(state.switch_time):
        state.rich_pool = 1 - state.rich_pool
        state.switched = True
    return state


def step_tick(state: EnvState, cfg: SimConfig,
              actions: dict[str, Action | None]) -> tuple[EnvState, list[dict]]:
    """Advance the world by one tick.

    Order: switch check, food spawns, movement (edge-clamped, overlaps
    allowed), collection in seeded-random order (a collector empties its
    cell), marker expiry, block color updates, clock increment. A forager
    missing from `actions` stays put. Mutates `state` and returns it with
    the tick's events.
    """
    known = {f.id for f in state.foragers}
    for fid in actions:
        if fid not in known:
            raise KeyError(f"unknown forager {fid!r} in actions")

    events: list[dict] = []
    tick = state.tick
    t = cfg.t_of(tick)

    was_switched = state.switched
    apply_switch(state, cfg)
    if state.switched and not was_switched:
        events.append({"kind": "switch", "tick": tick, "t": t,
                       "rich_pool": state.rich_pool})

    events.extend(spawn_food_tick(state, cfg, state.rng))

    window_floor = tick - cfg.color_every_ticks
    for f in state.foragers:
        action = actions.get(f.id) or Action.STAY
        dx, dy = ACTION_DELTAS[action]
        if dx or dy:
            x = min(max(f.position[0] + dx, 0), cfg.world_width - 1)
            y = min(max(f.position[1] + dy, 0), cfg.world_height - 1)
            if (x, y) != f.position:
                f.position = (x, y)
                events.append({"kind": "move", "tick": tick, "t": t,
                               "id": f.id, "x": x, "y": y})
        # Keep only collections inside the trailing success window.
        log = f.collection_log
        while log and log[0][0] <= window_floor:
            log.popleft()

    # Collection: seeded shuffle decides who empties a contested cell.
    order = state.rng.sample(range(len(state.foragers)), len(state.foragers))
    for i in order:
        f = state.foragers[i]
        pellets = state.food.pop(f.position, 0)
        if pellets:
            f.total_collected += pellets
            f.collection_log.append((tick, pellets))
            events.append({"kind": "collect", "tick": tick, "t": t,
                           "id": f.id, "x": f.position[0], "y": f.position[1],
                           "pellets": pellets})
            if not cfg.condition.food_visible:
                state.markers.append(Marker(f.position[0], f.position[1],
                                            f.id, tick + cfg.marker_ttl_ticks))

    if state.markers:
        state.markers = [m for m in state.markers if m.expiry_tick > tick]

    if (cfg.condition.success_indicated and tick > 0
            and tick % cfg.color_every_ticks == 0):
        for f in state.foragers:
            in_window = sum(p for tk, p in f.collection_log if tk > window_floor)
            f.color = success_color(in_window)

    state.tick = tick + 1
    return state, events


def build_views(state: EnvState, cfg: SimConfig) -> dict[str, ObserverView]:
    """Condition-filtered views for every forager, sharing the common parts."""
    cond = cfg.condition
    if cond.food_visible:
        food = [(x, y, c) for (x, y), c in sorted(state.food.items())]
    else:
        food = []
    everyone = [ViewForager(f.id, f.icon, f.position[0], f.position[1], f.color)
                for f in state.foragers]

    views = {}
    shared_cache: dict = {}
    for i, f in enumerate(state.foragers):
        if cond.food_visible:
            markers: list[Cell] = []
        else:
            markers = [(m.x, m.y) for m in state.markers
                       if m.owner == f.id and m.expiry_tick >= state.tick]
        views[f.id] = ObserverView(
            observer_id=f.id,
            tick=state.tick,
            width=cfg.world_width,
            height=cfg.world_height,
            position=f.position,
            total_collected=f.total_collected,
            food=food,
            markers=markers,
            foragers=everyone if cond.foragers_visible else [everyone[i]],
            shared_cache=shared_cache,
        )
    return views


def observer_view(state: EnvState, cfg: SimConfig, observer_id: str) -> ObserverView:
    """The world as `observer_id` is allowed to see it right now."""
    state.forager(observer_id)  # raises on unknown observer
    return build_views(state, cfg)[observer_id]


def snapshot(state: EnvState, cfg: SimConfig) -> dict | None:
    """Periodic log record of positions and scores; None off-cadence."""
    if state.tick % cfg.snapshot_every_ticks != 0:
        return None
    return {
        "kind": "snapshot",
        "tick": state.tick,
        "t": cfg.t_of(state.tick),
        "pool_centers": [list(c) for c in state.pool_centers],
        "rich_pool": state.rich_pool,
        "switched": state.switched,
        "foragers": [
            {"id": f.id, "x": f.position[0], "y": f.position[1],
             "score": f.total_collected}
            for f in state.foragers
        ],
    }
