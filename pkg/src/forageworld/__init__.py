"""Two-pool group-foraging gridworld: simulator, experiment server, analysis."""

from .config import Condition, ConfigError, SimConfig, validate_config
from .core import (
    Action,
    EnvState,
    ForagerState,
    ObserverView,
    PlacementError,
    apply_switch,
    init_game,
    observer_view,
    place_pools,
    snapshot,
    spawn_food_tick,
    step_tick,
    success_color,
)
from .agents import AgentMemory, StrategyParams, decide_action, preset, score_cell, update_memory
from .analysis import (
    MatchingStats,
    OccupancySample,
    aggregate_runs,
    align_on_switch,
    efficiency,
    gini,
    matching_stats,
    normalized_matching,
    occupancy_series,
    pool_membership,
)
from .logio import LogData, LogFormatError, LogWriter, read_log
from .runner import RunResult, run_game

__version__ = "0.1.0"
