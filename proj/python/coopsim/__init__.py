"""Cooperative uplink video scheduling simulator."""

from ._coopsim import (
    CoopConfig,
    DependencyEdge,
    FrameClass,
    GopSpec,
    PhyConfig,
    PriceHistoryEntry,
    PriceResult,
    ScenarioConfig,
    SimResult,
    SweepRow,
    UserStats,
    episode_csv,
    load_scenario,
    parse_scenario,
    price_history_csv,
    price_scenario,
    run_episode,
    scenario_to_json,
    sweep_csv,
    sweep_distance,
)

__all__ = [
    "CoopConfig",
    "DependencyEdge",
    "FrameClass",
    "GopSpec",
    "PhyConfig",
    "PriceHistoryEntry",
    "PriceResult",
    "ScenarioConfig",
    "SimResult",
    "SweepRow",
    "UserStats",
    "episode_csv",
    "load_scenario",
    "parse_scenario",
    "price_history_csv",
    "price_scenario",
    "run_episode",
    "scenario_to_json",
    "sweep_csv",
    "sweep_distance",
]
