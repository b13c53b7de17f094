"""Stochastic state-reduction simulator for the seven cat scenarios."""

from ._core import (
    DynamicsParams,
    EnsembleStats,
    Scenario,
    ScenarioFileError,
    SimEvent,
    TrajectoryRecord,
    Version,
    compare_hit_cdf,
    load_scenario,
    parse_scenario,
    run_ensemble,
    run_trajectory,
    serialize_scenario,
)

__all__ = [
    "DynamicsParams",
    "EnsembleStats",
    "Scenario",
    "ScenarioFileError",
    "SimEvent",
    "TrajectoryRecord",
    "Version",
    "compare_hit_cdf",
    "load_scenario",
    "parse_scenario",
    "run_ensemble",
    "run_trajectory",
    "serialize_scenario",
]
