"""Game configuration: information conditions, world parameters, validation."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Any

# Stock icon names assigned to participants, enough for a dozen per session.
ICONS = (
    "heart", "butterfly", "dog", "airplane", "arrow", "box", "bug", "car",
    "cow", "face-happy", "fish", "flag", "flower", "house", "leaf", "person",
    "plant", "sheep", "star", "target", "tree", "truck", "turtle", "wheel",
)

DEFAULT_SWITCH_TIMES = (162.0, 174.0, 186.0, 198.0, 210.0)


class ConfigError(ValueError):
    """Raised when a configuration violates a hard invariant."""


@dataclass(frozen=True)
class Condition:
    """The three per-game information toggles.

    Pairing success indication with invisible foragers is excluded: there is
    nobody on screen to carry the color.
    """

    food_visible: bool
    foragers_visible: bool
    success_indicated: bool

    def __post_init__(self) -> None:
        if self.success_indicated and not self.foragers_visible:
            raise ConfigError(
                "success indication requires visible foragers"
            )

    @property
    def label(self) -> str:
        return "food%s_foragers%s_success%s" % (
            "V" if self.food_visible else "I",
            "V" if self.foragers_visible else "I",
            "Y" if self.success_indicated else "N",
        )

    @classmethod
    def from_code(cls, code: str) -> "Condition":
        """Parse a 3-character 0/1 code ordered (food, foragers, success)."""
        code = code.strip()
        if len(code) != 3 or any(c not in "01" for c in code):
            raise ConfigError(f"condition code must be three 0/1 chars, got {code!r}")
        return cls(code[0] == "1", code[1] == "1", code[2] == "1")

    def to_dict(self) -> dict[str, bool]:
        return {
            "food_visible": self.food_visible,
            "foragers_visible": self.foragers_visible,
            "success_indicated": self.success_indicated,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Condition":
        return cls(
            bool(d["food_visible"]),
            bool(d["foragers_visible"]),
            bool(d["success_indicated"]),
        )


@dataclass(frozen=True)
class SimConfig:
    """Full parameterization of one game.

    All durations are in seconds and must quantize to whole ticks; the
    simulation clock itself is an integer tick counter.
    """

    condition: Condition
    n_foragers: int
    seed: int
    world_width: int = 60
    world_height: int = 60
    tick_seconds: float = 0.1
    game_seconds: float = 300.0
    rich_coeff: float = 0.0525
    poor_coeff: float = 0.0225
    pool_radius: float = 8.0
    min_pool_distance: float = 40.0
    membership_radius: float = 13.0
    success_window_seconds: float = 30.0
    marker_ttl_seconds: float = 2.0
    snapshot_interval_seconds: float = 2.0
    switch_time_choices: tuple[float, ...] = DEFAULT_SWITCH_TIMES

    # ----- derived tick quantities -----

    def _ticks(self, seconds: float) -> int:
        return round(seconds / self.tick_seconds)

    @property
    def total_ticks(self) -> int:
        return self._ticks(self.game_seconds)

    @property
    def snapshot_every_ticks(self) -> int:
        return self._ticks(self.snapshot_interval_seconds)

    @property
    def color_every_ticks(self) -> int:
        return self._ticks(self.success_window_seconds)

    @property
    def marker_ttl_ticks(self) -> int:
        return self._ticks(self.marker_ttl_seconds)

    def switch_tick(self, switch_time: float) -> int:
        return self._ticks(switch_time)

    def t_of(self, tick: int) -> float:
        return round(tick * self.tick_seconds, 6)

    @property
    def spawn_p_rich(self) -> float:
        return min(1.0, self.rich_coeff * self.n_foragers)

    @property
    def spawn_p_poor(self) -> float:
        return min(1.0, self.poor_coeff * self.n_foragers)

    @property
    def rich_share(self) -> float:
        total = self.rich_coeff + self.poor_coeff
        return self.rich_coeff / total if total > 0 else 0.0

    # ----- serialization (field order is part of the log contract) -----

    def to_dict(self) -> dict[str, Any]:
        return {
            "world_width": self.world_width,
            "world_height": self.world_height,
            "tick_seconds": self.tick_seconds,
            "game_seconds": self.game_seconds,
            "rich_coeff": self.rich_coeff,
            "poor_coeff": self.poor_coeff,
            "pool_radius": self.pool_radius,
            "min_pool_distance": self.min_pool_distance,
            "membership_radius": self.membership_radius,
            "success_window_seconds": self.success_window_seconds,
            "marker_ttl_seconds": self.marker_ttl_seconds,
            "snapshot_interval_seconds": self.snapshot_interval_seconds,
            "switch_time_choices": list(self.switch_time_choices),
            "condition": self.condition.to_dict(),
            "n_foragers": self.n_foragers,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SimConfig":
        return cls(
            condition=Condition.from_dict(d["condition"]),
            n_foragers=int(d["n_foragers"]),
            seed=int(d["seed"]),
            world_width=int(d["world_width"]),
            world_height=int(d["world_height"]),
            tick_seconds=float(d["tick_seconds"]),
            game_seconds=float(d["game_seconds"]),
            rich_coeff=float(d["rich_coeff"]),
            poor_coeff=float(d["poor_coeff"]),
            pool_radius=float(d["pool_radius"]),
            min_pool_distance=float(d["min_pool_distance"]),
            membership_radius=float(d["membership_radius"]),
            success_window_seconds=float(d["success_window_seconds"]),
            marker_ttl_seconds=float(d["marker_ttl_seconds"]),
            snapshot_interval_seconds=float(d["snapshot_interval_seconds"]),
            switch_time_choices=tuple(float(x) for x in d["switch_time_choices"]),
        )

    def with_overrides(self, **kwargs: Any) -> "SimConfig":
        if "condition" in kwargs and isinstance(kwargs["condition"], dict):
            kwargs["condition"] = Condition.from_dict(kwargs["condition"])
        if "switch_time_choices" in kwargs:
            kwargs["switch_time_choices"] = tuple(kwargs["switch_time_choices"])
        return replace(self, **kwargs)


def _is_tick_multiple(seconds: float, tick_seconds: float) -> bool:
    k = seconds / tick_seconds
    return abs(k - round(k)) <= 1e-9 * max(1.0, abs(k))


def config_warnings(cfg: SimConfig) -> list[str]:
    """Soft issues worth recording in the run log (currently: probability clamps)."""
    out = []
    p_rich = cfg.rich_coeff * cfg.n_foragers
    if p_rich > 1.0:
        out.append(
            f"rich spawn probability {p_rich:g} exceeds 1, clamped to 1.0"
        )
    p_poor = cfg.poor_coeff * cfg.n_foragers
    if p_poor > 1.0:
        out.append(
            f"poor spawn probability {p_poor:g} exceeds 1, clamped to 1.0"
        )
    return out


def validate_config(cfg: SimConfig) -> SimConfig:
    """Check every hard SimConfig invariant; return the config unchanged.

    Per-tick spawn probabilities above 1 are not an error: they are clamped
    at spawn time, and a warning is issued here so callers can log it.
    """
    if cfg.world_width < 1 or cfg.world_height < 1:
        raise ConfigError("world dimensions must be positive")
    for name in ("tick_seconds", "game_seconds", "pool_radius",
                 "membership_radius", "success_window_seconds",
                 "marker_ttl_seconds", "snapshot_interval_seconds"):
        if getattr(cfg, name) <= 0:
            raise ConfigError(f"{name} must be positive")
    if cfg.min_pool_distance < 0:
        raise ConfigError("min_pool_distance must be non-negative")
    if cfg.rich_coeff < 0 or cfg.poor_coeff < 0:
        raise ConfigError("spawn coefficients must be non-negative")
    if cfg.n_foragers < 0:
        raise ConfigError("n_foragers must be non-negative")

    for name in ("game_seconds", "success_window_seconds",
                 "marker_ttl_seconds", "snapshot_interval_seconds"):
        if not _is_tick_multiple(getattr(cfg, name), cfg.tick_seconds):
            raise ConfigError(f"{name} must be a whole number of ticks")

    if not cfg.switch_time_choices:
        raise ConfigError("switch_time_choices must be non-empty")
    for st in cfg.switch_time_choices:
        if not (0 < st < cfg.game_seconds):
            raise ConfigError(
                f"switch time {st:g} outside (0, {cfg.game_seconds:g})"
            )
        if not _is_tick_multiple(st, cfg.tick_seconds):
            raise ConfigError(f"switch time {st:g} is not a whole number of ticks")

    if 2 * cfg.membership_radius >= cfg.min_pool_distance:
        raise ConfigError(
            "2*membership_radius must be < min_pool_distance "
            "(a position may belong to at most one pool)"
        )

    for msg in config_warnings(cfg):
        warnings.warn(msg, UserWarning, stacklevel=2)
    return cfg


def pool_margin(cfg: SimConfig) -> int:
    """Centers stay this many cells from every edge so pools fit in-grid."""
    return math.ceil(cfg.pool_radius)
