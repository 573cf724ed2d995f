"""Daily-time-step surrogate model of potato growth.

The model advances crop and soil state one day at a time from sowing until
cultivar maturity (a thermal-time threshold scaled by earliness) or the end
of the weather year, whichever comes first, and reports fresh tuber yield.

Structure, per day:

* development: degree-days above a 2 degC base drive emergence, canopy
  expansion, tuber partitioning and maturity;
* light capture: exponential extinction of global radiation over LAI;
* assimilation: radiation-use efficiency times intercepted radiation, scaled
  by the more limiting of water and nitrogen stress;
* soil water: a single root-zone bucket (plus the not-yet-rooted remainder of
  the column down to the maximum rooting depth) with van Genuchten limits at
  pF 2.0 / pF 4.2, fed by rain and irrigation, drained beyond field capacity,
  depleted by transpiration and soil evaporation (Makkink reference ET from
  radiation and temperature only);
* nitrogen: a mineral pool fed by organic-matter mineralization and
  fertilizer events, taken up on demand from a critical dilution curve.

Everything is 64-bit floating point with a fixed evaluation order, so a
simulation is a pure, deterministic function of its inputs. Water extractions
are bounded before they are applied (never clamped afterwards), which keeps
the daily water balance closed to rounding error.

Internal units: biomass g dry matter/m2, water mm, nitrogen kg/ha, depth cm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from cropmeta.errors import ValidationError
from cropmeta.cropsim.soil import SoilColumn
from cropmeta.cropsim.types import (
    DailyRecord,
    ManagementPlan,
    SimulationResult,
    SoilType,
    WeatherDay,
    WeatherSeries,
)


@dataclass(frozen=True)
class SimParams:
    """Simulator constants. Defaults give Dutch-potato-like behaviour."""

    base_temp: float = 2.0             # degC, degree-day base
    tt_emergence: float = 150.0        # degC day from sowing to emergence
    tt_maturity_min: float = 1400.0    # degC day at earliness = 1
    tt_maturity_span: float = 600.0    # extra degC day at earliness = 0
    rue: float = 1.35                  # g DM per MJ intercepted global radiation
    k_ext: float = 0.6                 # canopy extinction coefficient
    sla: float = 0.025                 # m2 leaf per g leaf DM
    lai_init: float = 0.05             # LAI at emergence
    juvenile_lai: float = 0.75         # below this LAI expansion is thermal
    rgrl: float = 0.012                # relative LAI growth per degC day (juvenile)
    dvs_tuber_start: float = 0.25      # development stage where tuber fill starts
    dvs_tuber_full: float = 0.45       # stage where tuber partition reaches max
    tuber_partition_max: float = 0.85
    leaf_frac: float = 0.55            # shares of the non-tuber assimilate
    stem_frac: float = 0.30
    dvs_senescence: float = 0.75       # stage where canopy decline begins
    senescence_rate: float = 0.035     # max relative LAI loss per day
    root_growth_cm_per_cd: float = 0.12
    dvs_root_growth_end: float = 0.8
    initial_root_cm: float = 10.0
    kc_transpiration: float = 1.1
    ke_evaporation: float = 0.5
    raw_fraction: float = 0.55         # readily-available fraction of FC-WP span
    mineralization_kg_per_pct_om_30d: float = 2.0
    initial_mineral_n: float = 25.0    # kg/ha at sowing
    max_n_uptake: float = 6.0          # kg/ha/day
    n_conc_young: float = 0.06         # critical N as fraction of DM, small crops
    n_conc_floor: float = 0.025
    n_dilution_power: float = 0.45
    n_dilution_ref_t_ha: float = 1.2   # biomass above which dilution sets in
    dry_matter_fraction: float = 0.22  # tuber dry weight -> fresh weight

    def tt_maturity(self, earliness: float) -> float:
        return self.tt_maturity_min + self.tt_maturity_span * (1.0 - earliness)


DEFAULT_PARAMS = SimParams()


@dataclass
class SimState:
    """Mutable crop/soil state between daily steps."""

    column: SoilColumn
    thermal_time: float = 0.0
    emerged: bool = False
    mature: bool = False
    root_depth_cm: float = 0.0
    water_rooted_mm: float = 0.0
    water_below_mm: float = 0.0
    lai: float = 0.0
    leaf_dry: float = 0.0    # g/m2
    stem_dry: float = 0.0
    root_dry: float = 0.0
    tuber_dry: float = 0.0
    crop_n: float = 0.0      # kg/ha in the crop
    mineral_n: float = 0.0   # kg/ha plant-available

    @property
    def soil_water_mm(self) -> float:
        return self.water_rooted_mm + self.water_below_mm

    @property
    def total_dry(self) -> float:
        return self.leaf_dry + self.stem_dry + self.root_dry + self.tuber_dry


@dataclass(frozen=True, slots=True)
class DailyFlux:
    """Water fluxes of one step (mm), for balance checking."""

    rain: float
    irrigation: float
    transpiration: float
    evaporation: float
    drainage: float
    storage_before: float
    storage_after: float

    def residual(self) -> float:
        """Closure error: change in storage minus net input."""
        net_in = self.rain + self.irrigation
        net_out = self.transpiration + self.evaporation + self.drainage
        return (self.storage_after - self.storage_before) - (net_in - net_out)


def init_state(soil: SoilType, mgmt: ManagementPlan, params: SimParams = DEFAULT_PARAMS) -> SimState:
    """State at sowing: column wet to field capacity, roots at initial depth."""
    column = SoilColumn(soil, mgmt.max_rooting_depth)
    root0 = min(params.initial_root_cm, mgmt.max_rooting_depth)
    fc_total = column.field_capacity_mm(column.depth_cm)
    fc_root = column.field_capacity_mm(root0)
    return SimState(
        column=column,
        root_depth_cm=root0,
        water_rooted_mm=fc_root,
        water_below_mm=fc_total - fc_root,
        mineral_n=params.initial_mineral_n,
    )


def makkink_et0(radiation_mj: float, tmean_c: float) -> float:
    """Reference evapotranspiration (mm/day) from radiation and temperature."""
    es = 0.6108 * math.exp(17.27 * tmean_c / (tmean_c + 237.3))
    delta = 4098.0 * es / (tmean_c + 237.3) ** 2
    gamma = 0.066
    et0 = 0.65 * delta / (delta + gamma) * radiation_mj / 2.45
    return et0 if et0 > 0.0 else 0.0


def _critical_n_fraction(biomass_kg_ha: float, params: SimParams) -> float:
    """Critical N concentration (fraction of DM) from the dilution curve."""
    w_t = biomass_kg_ha / 1000.0
    if w_t <= params.n_dilution_ref_t_ha:
        return params.n_conc_young
    conc = params.n_conc_young * (w_t / params.n_dilution_ref_t_ha) ** (-params.n_dilution_power)
    return max(conc, params.n_conc_floor)


def _tuber_partition(dvs: float, params: SimParams) -> float:
    if dvs <= params.dvs_tuber_start:
        return 0.0
    if dvs >= params.dvs_tuber_full:
        return params.tuber_partition_max
    ramp = (dvs - params.dvs_tuber_start) / (params.dvs_tuber_full - params.dvs_tuber_start)
    return params.tuber_partition_max * ramp


def simulate_daily_step(
    state: SimState,
    wday: WeatherDay,
    mgmt: ManagementPlan,
    params: SimParams = DEFAULT_PARAMS,
) -> DailyFlux:
    """Advance ``state`` by one day and return the day's water fluxes.

    The state is updated in place. Call order within the day is fixed:
    development, root growth, infiltration/drainage, evapotranspiration,
    mineralization, assimilation and partitioning, N uptake.
    """
    col = state.column
    storage_before = state.soil_water_mm
    tt_mat = params.tt_maturity(mgmt.earliness)

    # development
    dtt = max(0.0, wday.tmean - params.base_temp)
    state.thermal_time += dtt
    if not state.emerged and state.thermal_time >= params.tt_emergence:
        state.emerged = True
        state.lai = params.lai_init
        state.leaf_dry = params.lai_init / params.sla
        state.crop_n = params.n_conc_young * state.total_dry * 10.0  # g/m2 -> kg/ha
    dvs = state.thermal_time / tt_mat

    # root deepening; water in the newly rooted span moves between buckets
    if state.emerged and dvs < params.dvs_root_growth_end:
        dz = min(
            params.root_growth_cm_per_cd * dtt,
            col.depth_cm - state.root_depth_cm,
        )
        if dz > 0.0:
            depth_below = col.depth_cm - state.root_depth_cm
            transfer = state.water_below_mm * (dz / depth_below)
            state.water_rooted_mm += transfer
            state.water_below_mm -= transfer
            state.root_depth_cm += dz

    # infiltration and drainage (tipping-bucket beyond field capacity)
    irrigation = sum(a for d, a in mgmt.irrigation_events if d == wday.doy)
    state.water_rooted_mm += wday.rain + irrigation
    fc_root = col.field_capacity_mm(state.root_depth_cm)
    drainage = 0.0
    if state.water_rooted_mm > fc_root:
        perc = state.water_rooted_mm - fc_root
        state.water_rooted_mm = fc_root
        state.water_below_mm += perc
        fc_below = col.field_capacity_mm(col.depth_cm) - fc_root
        if state.water_below_mm > fc_below:
            drainage = state.water_below_mm - fc_below
            state.water_below_mm = fc_below

    # evapotranspiration from the rooted zone
    et0 = makkink_et0(wday.radiation, wday.tmean)
    f_int = 1.0 - math.exp(-params.k_ext * state.lai) if state.emerged else 0.0
    t_pot = params.kc_transpiration * et0 * f_int
    e_pot = params.ke_evaporation * et0 * (1.0 - f_int)
    wp_root = col.wilting_point_mm(state.root_depth_cm)
    taw = fc_root - wp_root
    avail = state.water_rooted_mm - wp_root
    if avail < 0.0:
        avail = 0.0
    ramp = min(1.0, avail / (params.raw_fraction * taw)) if taw > 0.0 else 0.0
    transpiration = min(t_pot * ramp, avail)
    state.water_rooted_mm -= transpiration
    avail -= transpiration
    evaporation = min(e_pot, avail)
    state.water_rooted_mm -= evaporation
    f_water = transpiration / t_pot if t_pot > 1e-12 else 1.0

    # nitrogen supply
    mineralization = (
        params.mineralization_kg_per_pct_om_30d / 30.0 * (col.topsoil_om_frac * 100.0)
    )
    state.mineral_n += mineralization
    state.mineral_n += sum(a for d, a in mgmt.n_events if d == wday.doy)

    # growth
    if state.emerged and not state.mature:
        biomass_kg_ha = state.total_dry * 10.0
        if biomass_kg_ha < 100.0:
            f_nitrogen = 1.0
        else:
            n_crit = _critical_n_fraction(biomass_kg_ha, params) * biomass_kg_ha
            f_nitrogen = min(1.0, max(0.0, state.crop_n / n_crit))
        stress = min(f_water, f_nitrogen)
        assim = params.rue * wday.radiation * f_int * stress  # g/m2
        f_tuber = _tuber_partition(dvs, params)
        d_tuber = assim * f_tuber
        rest = assim - d_tuber
        d_leaf = rest * params.leaf_frac
        d_stem = rest * params.stem_frac
        d_root = rest - d_leaf - d_stem
        state.tuber_dry += d_tuber
        state.leaf_dry += d_leaf
        state.stem_dry += d_stem
        state.root_dry += d_root

        # canopy: thermal expansion while juvenile, leaf-mass driven after
        if state.lai < params.juvenile_lai and dvs < 0.4:
            d_lai = state.lai * params.rgrl * dtt * stress
        else:
            d_lai = params.sla * d_leaf
        death = params.senescence_rate * max(
            0.0, (dvs - params.dvs_senescence) / (1.0 - params.dvs_senescence)
        )
        state.lai = max(0.0, state.lai + d_lai - state.lai * death)

        # demand-driven N uptake against the new biomass
        biomass_new = state.total_dry * 10.0
        demand = max(
            0.0, _critical_n_fraction(biomass_new, params) * biomass_new - state.crop_n
        )
        uptake = min(demand, state.mineral_n, params.max_n_uptake)
        state.crop_n += uptake
        state.mineral_n -= uptake

    if state.thermal_time >= tt_mat:
        state.mature = True

    return DailyFlux(
        rain=wday.rain,
        irrigation=irrigation,
        transpiration=transpiration,
        evaporation=evaporation,
        drainage=drainage,
        storage_before=storage_before,
        storage_after=state.soil_water_mm,
    )


def run_simulation(
    weather: WeatherSeries,
    soil: SoilType,
    mgmt: ManagementPlan,
    params: SimParams = DEFAULT_PARAMS,
    keep_trace: bool = False,
) -> SimulationResult:
    """Run one season and return the fresh tuber yield.

    Deterministic: identical inputs give bit-identical results. Raises if the
    sowing date falls outside the weather coverage.
    """
    n_days = len(weather.days)
    if mgmt.sowing_doy > n_days:
        raise ValidationError(
            f"sowing doy {mgmt.sowing_doy} after end of weather year ({n_days} days)"
        )
    state = init_state(soil, mgmt, params)
    trace: list[DailyRecord] = []
    for doy in range(mgmt.sowing_doy, n_days + 1):
        simulate_daily_step(state, weather.days[doy - 1], mgmt, params)
        if keep_trace:
            trace.append(
                DailyRecord(
                    doy=doy,
                    thermal_time=state.thermal_time,
                    lai=state.lai,
                    soil_water_mm=state.soil_water_mm,
                    tuber_dry_kg_ha=state.tuber_dry * 10.0,
                    n_available_kg_ha=state.mineral_n,
                )
            )
        if state.mature:
            break
    fresh = state.tuber_dry * 0.01 / params.dry_matter_fraction  # g/m2 -> t/ha fresh
    return SimulationResult(
        fresh_yield=fresh,
        daily_trace=tuple(trace) if keep_trace else None,
    )
