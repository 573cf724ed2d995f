"""Randomised but reproducible management sampling.

One ``ManagementPlan`` per scenario, drawn from a fixed-order sequence of
distributions so that a given RNG state always yields the same plan:

1. sowing day, uniform integer in 100..135
2. cultivar earliness, uniform in [0, 1]
3. maximum rooting depth, uniform in [30, 60] cm
4. fertilisation: total N uniform in [0, 300] kg/ha over 1..3 dressings;
   the first dressing is at sowing, later ones 15..50 days after sowing,
   with normalised uniform weights splitting the total
5. irrigation: half of the plans are rainfed; the rest get 2..6 events on
   distinct days in 150..240, each 10..30 mm

The draw order is part of the stored-data contract: changing it changes
every generated dataset.
"""

from __future__ import annotations

import numpy as np

from cropmeta.cropsim.types import ManagementPlan

SOWING_DOY_RANGE = (100, 135)
MAX_ROOT_RANGE_CM = (30.0, 60.0)
TOTAL_N_RANGE = (0.0, 300.0)
N_EVENT_LAG_RANGE = (15, 50)
IRRIGATION_DOY_RANGE = (150, 240)
IRRIGATION_MM_RANGE = (10.0, 30.0)


def sample_management(rng: np.random.Generator) -> ManagementPlan:
    """Draw one management plan; consumes a fixed number of rng streams."""
    sowing_doy = int(rng.integers(SOWING_DOY_RANGE[0], SOWING_DOY_RANGE[1] + 1))
    earliness = float(rng.uniform(0.0, 1.0))
    max_root = float(rng.uniform(*MAX_ROOT_RANGE_CM))

    total_n = float(rng.uniform(*TOTAL_N_RANGE))
    n_splits = int(rng.integers(1, 4))
    lags = rng.integers(N_EVENT_LAG_RANGE[0], N_EVENT_LAG_RANGE[1] + 1, size=2)
    weights = rng.uniform(0.2, 1.0, size=3)
    days = [sowing_doy]
    for k in range(n_splits - 1):
        days.append(sowing_doy + int(lags[k]))
    w = weights[:n_splits]
    w = w / w.sum()
    by_day: dict[int, float] = {}
    for k, day in enumerate(days):
        # coinciding dressings merge; the split weights still sum to 1
        by_day[day] = by_day.get(day, 0.0) + float(w[k])
    n_events = tuple(
        (int(day), float(total_n * by_day[day])) for day in sorted(by_day)
    )

    irrigated = rng.random() < 0.5
    n_irr = int(rng.integers(2, 7))
    lo, hi = IRRIGATION_DOY_RANGE
    irr_days = rng.choice(np.arange(lo, hi + 1), size=n_irr, replace=False)
    irr_mm = rng.uniform(*IRRIGATION_MM_RANGE, size=n_irr)
    if irrigated:
        order = np.argsort(irr_days)
        irrigation_events = tuple(
            (int(irr_days[j]), float(irr_mm[j])) for j in order
        )
    else:
        irrigation_events = ()

    return ManagementPlan(
        sowing_doy=sowing_doy,
        n_events=n_events,
        irrigation_events=irrigation_events,
        earliness=earliness,
        max_rooting_depth=max_root,
    )
