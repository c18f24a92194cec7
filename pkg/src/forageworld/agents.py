"""Forager strategies for headless runs.

An agent scores every grid cell as a weighted sum of the information sources
its view exposes (visible food, private reward history, other foragers, their
indicated success, distance), picks a target cell by softmax, and steps toward
it. Hidden information contributes nothing, so the same weights degrade
gracefully across conditions.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .core import Action, Cell, ObserverView

DEFAULT_COLOR_VALUES = {
    "purple": 0.0,
    "blue": 0.25,
    "yellow": 0.5,
    "orange": 0.75,
    "red": 1.0,
}

PRESET_NAMES = ("random", "private", "food_greedy", "social", "scrounger")


@dataclass
class StrategyParams:
    w_food: float = 0.0
    w_hist: float = 0.0
    w_soc: float = 0.0
    w_succ: float = 0.0
    w_dist: float = 0.0
    temperature: float = 1.0
    history_decay: float = 0.99
    color_values: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_COLOR_VALUES))

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not (0 < self.history_decay <= 1):
            raise ValueError("history_decay must be in (0, 1]")
        for name in ("w_food", "w_hist", "w_soc", "w_succ", "w_dist"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


def preset(name: str) -> StrategyParams:
    """Named parameter bundles for the strategies worth comparing."""
    if name == "random":
        return StrategyParams(temperature=1.0)
    if name == "private":
        return StrategyParams(w_hist=1.0, w_dist=0.1)
    if name == "food_greedy":
        return StrategyParams(w_food=1.0, w_dist=0.1)
    if name == "social":
        return StrategyParams(w_hist=1.0, w_soc=0.5, w_dist=0.1)
    if name == "scrounger":
        return StrategyParams(w_succ=1.0, w_dist=0.1)
    raise ValueError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")


class AgentMemory:
    """Private reward history plus bookkeeping.

    Decay is applied through a running scale factor instead of touching every
    cell each tick, so a tick costs O(1); effective masses are raw * scale.
    """

    def __init__(self) -> None:
        self._raw: dict[Cell, float] = {}
        self._scale = 1.0
        self.marker_memory: set[Cell] = set()
        self.last_target: Cell | None = None

    @property
    def reward_history(self) -> dict[Cell, float]:
        return {c: m * self._scale for c, m in self._raw.items()}

    def history_mass(self, cell: Cell) -> float:
        return self._raw.get(cell, 0.0) * self._scale

    def total_mass(self) -> float:
        return sum(self._raw.values()) * self._scale

    def decay(self, factor: float) -> None:
        self._scale *= factor
        if self._scale < 1e-200:  # keep raw masses representable
            for c in self._raw:
                self._raw[c] *= self._scale
            self._scale = 1.0

    def add(self, cell: Cell, pellets: float) -> None:
        self._raw[cell] = self._raw.get(cell, 0.0) + pellets / self._scale

    def _history_arrays(self, height: int) -> tuple[np.ndarray, np.ndarray]:
        idx = np.fromiter((x * height + y for x, y in self._raw),
                          dtype=np.intp, count=len(self._raw))
        mass = np.fromiter(self._raw.values(), dtype=np.float64,
                           count=len(self._raw)) * self._scale
        return idx, mass


def update_memory(mem: AgentMemory, view: ObserverView,
                  collected_this_tick: int, params: StrategyParams) -> AgentMemory:
    """Decay the reward history, credit this tick's collection at the
    forager's cell, and refresh the remembered markers from the view."""
    mem.decay(params.history_decay)
    if collected_this_tick:
        mem.add(view.position, collected_this_tick)
    mem.marker_memory = set(view.markers)
    return mem


def score_cell(cell: Cell, view: ObserverView, mem: AgentMemory,
               params: StrategyParams) -> float:
    """Utility of one cell. Reference implementation; decide_action uses an
    equivalent vectorized pass over the whole grid."""
    u = 0.0
    if params.w_food:
        for x, y, count in view.food:
            if (x, y) == cell:
                u += params.w_food * count
                break
    if params.w_hist:
        u += params.w_hist * mem.history_mass(cell)
    if params.w_soc or params.w_succ:
        for f in view.foragers:
            if f.id == view.observer_id or (f.x, f.y) != cell:
                continue
            if params.w_soc:
                u += params.w_soc
            if params.w_succ:
                u += params.w_succ * params.color_values.get(f.color, 0.0)
    if params.w_dist:
        dx = view.position[0] - cell[0]
        dy = view.position[1] - cell[1]
        u -= params.w_dist * math.sqrt(dx * dx + dy * dy)
    return u


_dist_cache: dict[tuple[int, int], np.ndarray] = {}


def _dist_master(width: int, height: int) -> np.ndarray:
    """Distances from the origin over offsets -(W-1)..(W-1), -(H-1)..(H-1);
    the distance grid for any position is a window of this."""
    key = (width, height)
    if key not in _dist_cache:
        dx = np.arange(-(width - 1), width, dtype=np.float64)[:, None]
        dy = np.arange(-(height - 1), height, dtype=np.float64)[None, :]
        _dist_cache[key] = np.sqrt(dx * dx + dy * dy)
    return _dist_cache[key]


def _distances_from(pos: Cell, width: int, height: int) -> np.ndarray:
    master = _dist_master(width, height)
    x, y = pos
    return master[width - 1 - x:2 * width - 1 - x,
                  height - 1 - y:2 * height - 1 - y].ravel()


def _food_arrays(view: ObserverView) -> tuple[np.ndarray, np.ndarray]:
    # Same-tick views share this, so the conversion happens once per tick.
    cached = view.shared_cache.get("food_arrays")
    if cached is None:
        arr = np.asarray(view.food, dtype=np.float64)
        idx = (arr[:, 0] * view.height + arr[:, 1]).astype(np.intp)
        cached = (idx, arr[:, 2])
        view.shared_cache["food_arrays"] = cached
    return cached


def _cell_utilities(view: ObserverView, mem: AgentMemory,
                    params: StrategyParams) -> np.ndarray:
    w, h = view.width, view.height
    util = np.zeros(w * h)
    if params.w_food and view.food:
        idx, counts = _food_arrays(view)
        util[idx] += params.w_food * counts
    if params.w_hist and mem._raw:
        idx, mass = mem._history_arrays(h)
        np.add.at(util, idx, params.w_hist * mass)
    if params.w_soc or params.w_succ:
        for f in view.foragers:
            if f.id == view.observer_id:
                continue
            i = f.x * h + f.y
            if params.w_soc:
                util[i] += params.w_soc
            if params.w_succ:
                util[i] += params.w_succ * params.color_values.get(f.color, 0.0)
    if params.w_dist:
        util -= params.w_dist * _distances_from(view.position, w, h)
    return util


def _pick_target(util: np.ndarray, params: StrategyParams,
                 rng: random.Random, height: int) -> Cell:
    if params.temperature == 0:
        best = np.flatnonzero(util == util.max())
        flat = int(best[rng.randrange(len(best))])
    else:
        z = (util - util.max()) / params.temperature
        p = np.exp(z)
        cum = np.cumsum(p)
        r = rng.random() * cum[-1]
        flat = min(int(np.searchsorted(cum, r, side="right")), len(util) - 1)
    return flat // height, flat % height


def decide_action(view: ObserverView, mem: AgentMemory, params: StrategyParams,
                  rng: random.Random) -> Action:
    """Choose a target cell by softmax over utilities (temperature 0 is
    argmax with seeded tie-break), then step one cell toward it along the
    axis with the larger gap; an axis tie is broken by the rng."""
    util = _cell_utilities(view, mem, params)
    target = _pick_target(util, params, rng, view.height)
    mem.last_target = target

    dx = target[0] - view.position[0]
    dy = target[1] - view.position[1]
    if dx == 0 and dy == 0:
        return Action.STAY
    if abs(dx) == abs(dy):
        horizontal = rng.random() < 0.5
    else:
        horizontal = abs(dx) > abs(dy)
    if horizontal:
        return Action.RIGHT if dx > 0 else Action.LEFT
    return Action.UP if dy > 0 else Action.DOWN
