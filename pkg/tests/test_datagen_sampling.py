"""Management sampling and the factorial scenario grid."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cropmeta.datagen.management import sample_management
from cropmeta.datagen.scenarios import Scenario, build_factorial, scenario_seed
from cropmeta.datagen.soils import soil_library
from cropmeta.errors import ValidationError

SOILS = soil_library()


def test_sampling_reproducible():
    a = sample_management(np.random.default_rng(77))
    b = sample_management(np.random.default_rng(77))
    assert a == b


def test_sampled_ranges():
    rng = np.random.default_rng(0)
    plans = [sample_management(rng) for _ in range(10_000)]
    sowing = [p.sowing_doy for p in plans]
    assert min(sowing) >= 100 and max(sowing) <= 135
    assert all(0.0 <= p.earliness <= 1.0 for p in plans)
    assert all(30.0 <= p.max_rooting_depth <= 60.0 for p in plans)
    assert all(0.0 <= p.total_n() <= 300.0 for p in plans)
    assert all(p.total_irrigation() <= 6 * 30.0 for p in plans)


def test_half_of_plans_irrigated():
    rng = np.random.default_rng(1)
    plans = [sample_management(rng) for _ in range(10_000)]
    dry = sum(1 for p in plans if not p.irrigation_events) / len(plans)
    assert dry == pytest.approx(0.5, abs=0.02)


def test_event_days_sorted_and_unique():
    rng = np.random.default_rng(2)
    for _ in range(500):
        p = sample_management(rng)
        n_days = [d for d, _ in p.n_events]
        irr_days = [d for d, _ in p.irrigation_events]
        assert n_days == sorted(n_days)
        assert len(set(n_days)) == len(n_days)
        assert irr_days == sorted(irr_days)
        assert len(set(irr_days)) == len(irr_days)
        assert all(a > 0 for _, a in p.n_events)


def test_factorial_example_counts():
    grid = build_factorial(1, range(7), range(1989, 2021), SOILS, 12)
    assert len(grid) == 7 * 32 * 32 * 12 == 86_016
    grid = build_factorial(1, range(1), [2000], SOILS[:1], 1)
    assert len(grid) == 1


@settings(max_examples=25, deadline=None)
@given(
    n_loc=st.integers(min_value=1, max_value=4),
    n_years=st.integers(min_value=1, max_value=4),
    n_soils=st.integers(min_value=1, max_value=6),
    reps=st.integers(min_value=1, max_value=3),
)
def test_factorial_cardinality_and_order(n_loc, n_years, n_soils, reps):
    years = list(range(2000, 2000 + n_years))
    soils = SOILS[:n_soils]
    grid = build_factorial(3, range(n_loc), years, soils, reps)
    assert len(grid) == n_loc * n_years * n_soils * reps
    # row-major: location, then year, then soil, then replicate
    expected = [
        (loc, year, soil.code, rep)
        for loc in range(n_loc)
        for year in years
        for soil in soils
        for rep in range(reps)
    ]
    assert [(s.location_id, s.year, s.soil_code, s.replicate) for s in grid] == expected
    assert len({s.rng_seed for s in grid}) == len(grid)


def test_factorial_rejects_duplicate_codes():
    with pytest.raises(ValidationError):
        build_factorial(1, range(2), [2000], [SOILS[0], SOILS[0]], 1)


def test_factorial_rejects_empty_axes():
    with pytest.raises(ValidationError):
        build_factorial(1, range(0), [2000], SOILS[:2], 1)
    with pytest.raises(ValidationError):
        build_factorial(1, range(1), [2000], SOILS[:2], 0)


def test_scenario_seed_distinct_across_master_seeds():
    a = scenario_seed(1, 0, 2000, 201, 0)
    b = scenario_seed(2, 0, 2000, 201, 0)
    assert a != b


def test_scenario_seed_matches_grid_entries():
    grid = build_factorial(9, range(2), [2001], SOILS[:2], 2)
    sc = grid[-1]
    assert isinstance(sc, Scenario)
    assert sc.rng_seed == scenario_seed(9, sc.location_id, sc.year,
                                        sc.soil_code, sc.replicate)
