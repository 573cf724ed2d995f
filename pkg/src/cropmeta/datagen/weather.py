"""Seeded synthetic weather and weather stores.

The synthetic generator produces Dutch-like daily weather: a seasonal
sinusoid for temperature and clear-sky radiation, an AR(1) temperature
anomaly, first-order Markov rainfall occurrence with gamma-distributed
amounts, and cloudiness coupling radiation to rain. Seven canonical
locations differ in mean temperature, wetness and radiation level; any
location index is accepted (parameters repeat with period 7).

Every location-year is generated from its own seed derived from the master
seed, so series are reproducible individually and independent of the order
in which they are requested.
"""

from __future__ import annotations

import calendar
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from cropmeta.errors import ValidationError
from cropmeta.cropsim.io import read_weather_csv, weather_csv_name, write_weather_csv
from cropmeta.cropsim.types import WeatherDay, WeatherSeries

#: Default year span shipped with the toolkit (32 years).
DEFAULT_YEARS = tuple(range(1989, 2021))
DEFAULT_N_LOCATIONS = 7

# per-location parameter tables (index modulo 7)
_LOC_TMEAN = (9.4, 8.6, 10.1, 9.0, 10.8, 8.2, 11.4)
_LOC_WETNESS = (1.0, 0.75, 1.2, 0.9, 1.35, 1.1, 0.8)
_LOC_RADIATION = (1.0, 1.08, 0.94, 1.04, 0.9, 1.12, 0.97)

_TEMP_AMPLITUDE = 7.3
_TEMP_PEAK_DOY = 202.0
_AR1 = 0.72
_AR1_SIGMA = 2.3


def location_year_seed(master_seed: int, location_id: int, year: int) -> list[int]:
    """Entropy words for one location-year stream."""
    return [master_seed & 0xFFFFFFFF, 0x77EA, location_id & 0xFFFF, year & 0xFFFF]


def generate_weather(master_seed: int, location_id: int, year: int) -> WeatherSeries:
    """One synthetic location-year, deterministic in (master_seed, location, year)."""
    if location_id < 0:
        raise ValidationError(f"location_id must be >= 0, got {location_id}")
    rng = np.random.default_rng(location_year_seed(master_seed, location_id, year))
    i = location_id % DEFAULT_N_LOCATIONS
    n_days = 366 if calendar.isleap(year) else 365
    doy = np.arange(1, n_days + 1, dtype=np.float64)

    # year-level anomalies, drawn first so day draws stay aligned
    year_temp = rng.normal(0.0, 1.1)
    year_rad = float(np.clip(rng.normal(1.0, 0.07), 0.8, 1.2))
    year_wet = float(np.clip(rng.normal(1.0, 0.22), 0.4, 1.8))

    phase = 2.0 * np.pi * (doy - (_TEMP_PEAK_DOY - 91.3125)) / 365.25
    t_season = _LOC_TMEAN[i] + year_temp + _TEMP_AMPLITUDE * np.sin(phase)

    eps = rng.normal(0.0, _AR1_SIGMA, n_days)
    anomaly = np.empty(n_days)
    prev = 0.0
    for d in range(n_days):
        prev = _AR1 * prev + eps[d]
        anomaly[d] = prev
    tmean = t_season + anomaly

    # rainfall: Markov occurrence, gamma amounts
    wet_level = _LOC_WETNESS[i] * year_wet
    p_wd = float(np.clip(0.26 * wet_level, 0.02, 0.85))
    p_ww = float(np.clip(0.55 * wet_level, 0.05, 0.92))
    occ_u = rng.random(n_days)
    amounts = rng.gamma(0.75, 5.6, n_days) * wet_level
    wet = np.zeros(n_days, dtype=bool)
    state = occ_u[0] < 0.35
    wet[0] = state
    for d in range(1, n_days):
        state = occ_u[d] < (p_ww if state else p_wd)
        wet[d] = state
    rain = np.where(wet, np.clip(amounts, 0.0, 55.0), 0.0)

    # radiation: clear-sky seasonal envelope scaled by cloudiness
    clear = np.maximum(1.0, 17.0 + 13.0 * np.sin(2.0 * np.pi * (doy - 81.0) / 365.25))
    cloud_u = rng.random(n_days)
    cloud = np.where(wet, 0.12 + 0.38 * cloud_u, 0.40 + 0.58 * cloud_u)
    radiation = clear * cloud * _LOC_RADIATION[i] * year_rad

    # diurnal range widens on clear days
    range_noise = rng.normal(0.0, 1.2, n_days)
    t_range = np.maximum(
        1.5,
        7.5
        + 2.2 * np.sin(2.0 * np.pi * (doy - 105.0) / 365.25)
        + 3.5 * (cloud - 0.55)
        + range_noise,
    )

    days = tuple(
        WeatherDay(
            doy=int(doy[d]),
            radiation=float(radiation[d]),
            rain=float(rain[d]),
            tmax=float(tmean[d] + 0.5 * t_range[d]),
            tmin=float(tmean[d] - 0.5 * t_range[d]),
        )
        for d in range(n_days)
    )
    return WeatherSeries(location_id=location_id, year=year, days=days)


@dataclass
class SyntheticWeatherStore:
    """On-demand generator-backed weather store (cached per location-year)."""

    master_seed: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def get(self, location_id: int, year: int) -> WeatherSeries:
        key = (location_id, year)
        series = self._cache.get(key)
        if series is None:
            series = generate_weather(self.master_seed, location_id, year)
            self._cache[key] = series
        return series

    def has(self, location_id: int, year: int) -> bool:
        return True

    def __getstate__(self):
        return {"master_seed": self.master_seed}

    def __setstate__(self, state):
        self.master_seed = state["master_seed"]
        self._cache = {}


@dataclass
class CsvWeatherStore:
    """Weather store reading ``<location>_<year>.csv`` files from a directory."""

    directory: str | Path
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def _path(self, location_id: int, year: int) -> Path:
        return Path(self.directory) / weather_csv_name(location_id, year)

    def get(self, location_id: int, year: int) -> WeatherSeries:
        key = (location_id, year)
        series = self._cache.get(key)
        if series is None:
            path = self._path(location_id, year)
            if not path.exists():
                raise ValidationError(
                    f"no weather file for location {location_id}, year {year}: {path}"
                )
            series = read_weather_csv(path, location_id, year)
            self._cache[key] = series
        return series

    def has(self, location_id: int, year: int) -> bool:
        return self._path(location_id, year).exists()

    def __getstate__(self):
        return {"directory": self.directory}

    def __setstate__(self, state):
        self.directory = state["directory"]
        self._cache = {}


def export_weather_csv_dir(
    store: SyntheticWeatherStore,
    directory: str | Path,
    locations: range | list[int],
    years: range | list[int] | tuple[int, ...],
) -> None:
    """Materialise a synthetic store as a directory of CSV files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for loc in locations:
        for year in years:
            series = store.get(loc, year)
            write_weather_csv(series, directory / weather_csv_name(loc, year))
