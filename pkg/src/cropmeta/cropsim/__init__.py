"""Surrogate process-based potato growth model (daily time steps)."""

from cropmeta.cropsim.types import (
    DailyRecord,
    ManagementPlan,
    SimulationResult,
    SoilHorizon,
    SoilType,
    WeatherDay,
    WeatherSeries,
)
from cropmeta.cropsim.soil import (
    FIELD_CAPACITY_HEAD_CM,
    WILTING_POINT_HEAD_CM,
    SoilColumn,
    derive_hydraulic_limits,
    vg_water_content,
)
from cropmeta.cropsim.simulation import (
    DEFAULT_PARAMS,
    DailyFlux,
    SimParams,
    SimState,
    init_state,
    makkink_et0,
    run_simulation,
    simulate_daily_step,
)

__all__ = [
    "DailyRecord",
    "ManagementPlan",
    "SimulationResult",
    "SoilHorizon",
    "SoilType",
    "WeatherDay",
    "WeatherSeries",
    "FIELD_CAPACITY_HEAD_CM",
    "WILTING_POINT_HEAD_CM",
    "SoilColumn",
    "derive_hydraulic_limits",
    "vg_water_content",
    "DEFAULT_PARAMS",
    "DailyFlux",
    "SimParams",
    "SimState",
    "init_state",
    "makkink_et0",
    "run_simulation",
    "simulate_daily_step",
]
