"""Factorial scenario grids.

A scenario is one cell of the (location, year, soil, replicate) factorial
plus the seed for its management draw. The seed packs the four indices and
the master seed into distinct bit fields, so every scenario in a grid has
a unique, order-independent seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from cropmeta.cropsim.types import SoilType
from cropmeta.errors import ValidationError


@dataclass(frozen=True)
class Scenario:
    """One simulation unit of the factorial design."""

    location_id: int
    year: int
    soil_code: int
    replicate: int
    rng_seed: int


def scenario_seed(master_seed: int, location_id: int, year: int,
                  soil_code: int, replicate: int) -> int:
    """Pack indices into one 96-bit seed; unique per grid cell."""
    seed = master_seed & 0xFFFFFFFF
    for part in (location_id, year, soil_code, replicate):
        seed = (seed << 16) | (part & 0xFFFF)
    return seed


def build_factorial(
    master_seed: int,
    locations: Sequence[int] | Iterable[int],
    years: Sequence[int] | Iterable[int],
    soils: Sequence[SoilType],
    replicates: int,
) -> list[Scenario]:
    """Full factorial in row-major order: location, year, soil, replicate."""
    locations = list(locations)
    years = list(years)
    if replicates < 1:
        raise ValidationError(f"replicates must be >= 1, got {replicates}")
    if not locations or not years or not soils:
        raise ValidationError("factorial needs at least one location, year and soil")
    codes = [s.code for s in soils]
    if len(set(codes)) != len(codes):
        raise ValidationError("soil codes in a factorial must be distinct")
    out: list[Scenario] = []
    for loc in locations:
        for year in years:
            for soil in soils:
                for rep in range(replicates):
                    out.append(Scenario(
                        location_id=loc,
                        year=year,
                        soil_code=soil.code,
                        replicate=rep,
                        rng_seed=scenario_seed(master_seed, loc, year, soil.code, rep),
                    ))
    return out
