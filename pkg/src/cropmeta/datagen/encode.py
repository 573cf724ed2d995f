"""Fixed-layout network encodings of scenarios.

Each sample couples three input blocks to one target:

* temporal, float array (6, 210): daily radiation, rain, tmax and tmin
  over days of year 91..300, plus cumulative irrigation and cumulative
  fertiliser N as step curves over the same window
* scalars, float array (3,): maximum rooting depth, sowing day, earliness
* soil, float array (7, 120): per-centimetre clay, loam, organic matter,
  saturated water content and van Genuchten alpha, lambda, n down to 120 cm

The soil block is optional at network level but always encoded, so one
stored dataset serves both the soil-aware and soil-blind configurations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cropmeta.cropsim.types import ManagementPlan, SoilType, WeatherSeries
from cropmeta.errors import ValidationError

TEMPORAL_WINDOW = (91, 300)
TEMPORAL_LENGTH = TEMPORAL_WINDOW[1] - TEMPORAL_WINDOW[0] + 1
TEMPORAL_CHANNELS = (
    "radiation", "rain", "tmax", "tmin", "cum_irrigation", "cum_nitrogen",
)
SCALAR_FIELDS = ("max_rooting_depth", "sowing_doy", "earliness")
SOIL_CHANNELS = (
    "clay_frac", "loam_frac", "om_frac", "theta_sat",
    "vg_alpha", "vg_lambda", "vg_n",
)
SOIL_DEPTH_CM = 120


@dataclass(frozen=True)
class Sample:
    """One encoded scenario: inputs, target and identifying metadata."""

    temporal: np.ndarray
    scalars: np.ndarray
    soil: np.ndarray
    target: float
    location_id: int
    year: int
    soil_code: int

    def __post_init__(self):
        if self.temporal.shape != (len(TEMPORAL_CHANNELS), TEMPORAL_LENGTH):
            raise ValidationError(
                f"temporal block must be {(len(TEMPORAL_CHANNELS), TEMPORAL_LENGTH)}, "
                f"got {self.temporal.shape}")
        if self.scalars.shape != (len(SCALAR_FIELDS),):
            raise ValidationError(
                f"scalar block must be ({len(SCALAR_FIELDS)},), got {self.scalars.shape}")
        if self.soil.shape != (len(SOIL_CHANNELS), SOIL_DEPTH_CM):
            raise ValidationError(
                f"soil block must be {(len(SOIL_CHANNELS), SOIL_DEPTH_CM)}, "
                f"got {self.soil.shape}")


def encode_temporal(weather: WeatherSeries, mgmt: ManagementPlan) -> np.ndarray:
    """(6, 210) block over days of year 91..300."""
    lo, hi = TEMPORAL_WINDOW
    if weather.days[0].doy > lo or weather.days[-1].doy < hi:
        raise ValidationError(
            f"weather for location {weather.location_id}, year {weather.year} "
            f"does not cover days {lo}..{hi}")
    block = np.zeros((len(TEMPORAL_CHANNELS), TEMPORAL_LENGTH), dtype=np.float64)
    for t, doy in enumerate(range(lo, hi + 1)):
        day = weather.day(doy)
        block[0, t] = day.radiation
        block[1, t] = day.rain
        block[2, t] = day.tmax
        block[3, t] = day.tmin
    doys = np.arange(lo, hi + 1)
    for doy, mm in mgmt.irrigation_events:
        block[4, doys >= doy] += mm
    for doy, kg in mgmt.n_events:
        block[5, doys >= doy] += kg
    return block


def encode_scalars(mgmt: ManagementPlan) -> np.ndarray:
    """(3,) block: rooting depth, sowing day, earliness."""
    return np.array(
        [mgmt.max_rooting_depth, float(mgmt.sowing_doy), mgmt.earliness],
        dtype=np.float64,
    )


def encode_soil(soil: SoilType) -> np.ndarray:
    """(7, 120) block of per-centimetre horizon properties."""
    block = np.zeros((len(SOIL_CHANNELS), SOIL_DEPTH_CM), dtype=np.float64)
    for layer in range(SOIL_DEPTH_CM):
        h = soil.horizon_at(layer + 0.5)
        block[0, layer] = h.clay_frac
        block[1, layer] = h.loam_frac
        block[2, layer] = h.om_frac
        block[3, layer] = h.theta_sat
        block[4, layer] = h.vg_alpha
        block[5, layer] = h.vg_lambda
        block[6, layer] = h.vg_n
    return block


def encode_sample(
    weather: WeatherSeries,
    soil: SoilType,
    mgmt: ManagementPlan,
    target: float,
) -> Sample:
    """Bundle all blocks for one simulated scenario."""
    return Sample(
        temporal=encode_temporal(weather, mgmt),
        scalars=encode_scalars(mgmt),
        soil=encode_soil(soil),
        target=float(target),
        location_id=weather.location_id,
        year=weather.year,
        soil_code=soil.code,
    )
