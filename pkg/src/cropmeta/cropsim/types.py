"""Input and output containers for the crop simulator.

All containers validate their invariants on construction and raise
:class:`~cropmeta.errors.ValidationError` on bad data, so downstream code can
assume well-formed inputs.

Units: radiation MJ/m2/day, rain and irrigation mm, temperatures degC,
depths cm, nitrogen kg N/ha, yields fresh tonne/ha.
"""

from __future__ import annotations

from dataclasses import dataclass

from cropmeta.errors import ValidationError

#: Soil class code ranges: 1xx clay, 2xx peat, 3xx sand.
PEAT_CODE_RANGE = (200, 299)
SAND_CODE_RANGE = (300, 399)


@dataclass(frozen=True, slots=True)
class WeatherDay:
    """One day of weather forcing."""

    doy: int
    radiation: float  # MJ/m2/day, global
    rain: float       # mm/day
    tmax: float       # degC
    tmin: float       # degC

    def __post_init__(self):
        if not 1 <= self.doy <= 366:
            raise ValidationError(f"doy {self.doy} outside 1..366")
        if self.radiation < 0:
            raise ValidationError(f"doy {self.doy}: radiation {self.radiation} < 0")
        if self.rain < 0:
            raise ValidationError(f"doy {self.doy}: rain {self.rain} < 0")
        if self.tmax < self.tmin:
            raise ValidationError(
                f"doy {self.doy}: tmax {self.tmax} < tmin {self.tmin}"
            )

    @property
    def tmean(self) -> float:
        return 0.5 * (self.tmax + self.tmin)


@dataclass(frozen=True)
class WeatherSeries:
    """A full calendar year of daily weather for one location."""

    location_id: int
    year: int
    days: tuple[WeatherDay, ...]

    def __post_init__(self):
        n = len(self.days)
        if n not in (365, 366):
            raise ValidationError(
                f"weather {self.location_id}/{self.year}: {n} days, expected 365 or 366"
            )
        for i, d in enumerate(self.days):
            if d.doy != i + 1:
                raise ValidationError(
                    f"weather {self.location_id}/{self.year}: day {i} has doy {d.doy},"
                    " series must be gapless and sorted"
                )

    def day(self, doy: int) -> WeatherDay:
        if not 1 <= doy <= len(self.days):
            raise ValidationError(
                f"doy {doy} outside weather coverage 1..{len(self.days)}"
            )
        return self.days[doy - 1]


@dataclass(frozen=True, slots=True)
class SoilHorizon:
    """One depth interval of a soil profile with van Genuchten retention."""

    top_cm: float
    bottom_cm: float
    clay_frac: float
    loam_frac: float
    om_frac: float
    theta_sat: float
    vg_alpha: float   # 1/cm
    vg_lambda: float  # conductivity shape parameter, carried as a soil feature
    vg_n: float
    theta_res: float

    def __post_init__(self):
        if self.bottom_cm <= self.top_cm:
            raise ValidationError(
                f"horizon [{self.top_cm}, {self.bottom_cm}]: bottom must exceed top"
            )
        for name in ("clay_frac", "loam_frac", "om_frac"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"horizon {name}={v} outside [0, 1]")
        if not 0.0 <= self.theta_res < self.theta_sat <= 1.0:
            raise ValidationError(
                f"horizon requires 0 <= theta_res < theta_sat <= 1,"
                f" got theta_res={self.theta_res}, theta_sat={self.theta_sat}"
            )
        if self.vg_n <= 1.0:
            raise ValidationError(f"vg_n must exceed 1, got {self.vg_n}")
        if self.vg_alpha <= 0.0:
            raise ValidationError(f"vg_alpha must be positive, got {self.vg_alpha}")


@dataclass(frozen=True)
class SoilType:
    """A soil class: integer code plus a contiguous horizon stack.

    Codes follow the 1xx clay / 2xx peat / 3xx sand convention. Horizons must
    tile the profile from 0 cm down to at least 120 cm without gaps.
    """

    code: int
    horizons: tuple[SoilHorizon, ...]

    MIN_PROFILE_CM = 120.0

    def __post_init__(self):
        if not self.horizons:
            raise ValidationError(f"soil {self.code}: no horizons")
        if self.horizons[0].top_cm != 0.0:
            raise ValidationError(f"soil {self.code}: profile must start at 0 cm")
        for above, below in zip(self.horizons, self.horizons[1:]):
            if below.top_cm != above.bottom_cm:
                raise ValidationError(
                    f"soil {self.code}: gap between {above.bottom_cm} and {below.top_cm} cm"
                )
        if self.horizons[-1].bottom_cm < self.MIN_PROFILE_CM:
            raise ValidationError(
                f"soil {self.code}: profile ends at {self.horizons[-1].bottom_cm} cm,"
                f" needs >= {self.MIN_PROFILE_CM}"
            )

    @property
    def depth_cm(self) -> float:
        return self.horizons[-1].bottom_cm

    def horizon_at(self, depth_cm: float) -> SoilHorizon:
        """Horizon containing ``depth_cm`` (lower boundaries belong to the horizon above)."""
        if depth_cm < 0 or depth_cm > self.depth_cm:
            raise ValidationError(
                f"soil {self.code}: depth {depth_cm} cm outside profile 0..{self.depth_cm}"
            )
        for h in self.horizons:
            if depth_cm < h.bottom_cm:
                return h
        return self.horizons[-1]

    def is_peat(self) -> bool:
        return PEAT_CODE_RANGE[0] <= self.code <= PEAT_CODE_RANGE[1]

    def is_sand(self) -> bool:
        return SAND_CODE_RANGE[0] <= self.code <= SAND_CODE_RANGE[1]


@dataclass(frozen=True)
class ManagementPlan:
    """Crop management for one season."""

    sowing_doy: int
    n_events: tuple[tuple[int, float], ...] = ()          # (doy, kg N/ha)
    irrigation_events: tuple[tuple[int, float], ...] = () # (doy, mm)
    earliness: float = 0.5    # 0 = latest cultivar, 1 = earliest
    max_rooting_depth: float = 50.0  # cm

    def __post_init__(self):
        if not 1 <= self.sowing_doy <= 366:
            raise ValidationError(f"sowing_doy {self.sowing_doy} outside calendar year")
        for label, events in (("n", self.n_events), ("irrigation", self.irrigation_events)):
            for doy, amount in events:
                if not 1 <= doy <= 366:
                    raise ValidationError(f"{label} event doy {doy} outside calendar year")
                if amount < 0:
                    raise ValidationError(f"{label} event amount {amount} < 0")
        if not 0.0 <= self.earliness <= 1.0:
            raise ValidationError(f"earliness {self.earliness} outside [0, 1]")
        if not 20.0 <= self.max_rooting_depth <= 120.0:
            raise ValidationError(
                f"max_rooting_depth {self.max_rooting_depth} outside [20, 120] cm"
            )

    def total_n(self) -> float:
        return sum(a for _, a in self.n_events)

    def total_irrigation(self) -> float:
        return sum(a for _, a in self.irrigation_events)


@dataclass(frozen=True, slots=True)
class DailyRecord:
    """Per-day simulation trace entry."""

    doy: int
    thermal_time: float      # degC day since sowing
    lai: float
    soil_water_mm: float     # total water in the tracked soil column
    tuber_dry_kg_ha: float
    n_available_kg_ha: float # mineral N pool


@dataclass(frozen=True)
class SimulationResult:
    """Simulator output: fresh tuber yield plus an optional daily trace."""

    fresh_yield: float  # tonne/ha
    daily_trace: tuple[DailyRecord, ...] | None = None

    def __post_init__(self):
        if self.fresh_yield < 0:
            raise ValidationError(f"fresh_yield {self.fresh_yield} < 0")
