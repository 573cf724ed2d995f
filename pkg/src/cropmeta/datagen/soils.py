"""Deterministic soil-type library.

Thirty-two profiles in two families: sixteen peat soils (codes 201-216,
high organic matter, strong water retention) and sixteen sand soils
(codes 301-316, low organic matter, weak retention). Each profile has
three horizons (0-30, 30-60, 60-120 cm). Family members span their
parameter ranges on an evenly spaced grid, so the library is a pure
function of nothing: no seed involved.

``soil_library()`` returns the profiles interleaved (peat, sand, peat,
sand, ...) so that any contiguous slice mixes both families.
"""

from __future__ import annotations

from cropmeta.cropsim.types import SoilHorizon, SoilType
from cropmeta.errors import ValidationError

N_PER_FAMILY = 16

PEAT_OM_RANGE = (0.15, 0.45)
SAND_VG_N_RANGE = (1.5, 2.8)


def _grid(lo: float, hi: float, i: int, n: int = N_PER_FAMILY) -> float:
    return lo + (hi - lo) * i / (n - 1)


def make_peat_soil(index: int) -> SoilType:
    """Peat profile ``index`` in 0..15 (code 201 + index)."""
    if not 0 <= index < N_PER_FAMILY:
        raise ValidationError(f"peat index must be in 0..15, got {index}")
    om_top = _grid(*PEAT_OM_RANGE, index)
    alpha = _grid(0.009, 0.014, index)
    n = _grid(1.32, 1.48, index)
    theta_sat = _grid(0.70, 0.82, index)
    horizons = (
        SoilHorizon(0.0, 30.0, clay_frac=0.12, loam_frac=0.20, om_frac=om_top,
                    theta_sat=theta_sat, vg_alpha=alpha, vg_lambda=0.5, vg_n=n,
                    theta_res=0.10),
        SoilHorizon(30.0, 60.0, clay_frac=0.14, loam_frac=0.22, om_frac=0.8 * om_top,
                    theta_sat=theta_sat - 0.04, vg_alpha=alpha * 1.1, vg_lambda=0.5,
                    vg_n=n + 0.03, theta_res=0.09),
        SoilHorizon(60.0, 120.0, clay_frac=0.16, loam_frac=0.24, om_frac=0.5 * om_top,
                    theta_sat=theta_sat - 0.08, vg_alpha=alpha * 1.25, vg_lambda=0.5,
                    vg_n=n + 0.06, theta_res=0.08),
    )
    return SoilType(code=201 + index, horizons=horizons)


def make_sand_soil(index: int) -> SoilType:
    """Sand profile ``index`` in 0..15 (code 301 + index)."""
    if not 0 <= index < N_PER_FAMILY:
        raise ValidationError(f"sand index must be in 0..15, got {index}")
    n = _grid(*SAND_VG_N_RANGE, index)
    om_top = _grid(0.020, 0.070, N_PER_FAMILY - 1 - index)
    alpha = _grid(0.014, 0.024, index)
    theta_sat = _grid(0.47, 0.41, index)
    horizons = (
        SoilHorizon(0.0, 30.0, clay_frac=0.03, loam_frac=0.10, om_frac=om_top,
                    theta_sat=theta_sat, vg_alpha=alpha, vg_lambda=0.5, vg_n=n,
                    theta_res=0.045),
        SoilHorizon(30.0, 60.0, clay_frac=0.03, loam_frac=0.08, om_frac=0.4 * om_top,
                    theta_sat=theta_sat - 0.02, vg_alpha=alpha * 1.15, vg_lambda=0.5,
                    vg_n=n + 0.05, theta_res=0.04),
        SoilHorizon(60.0, 120.0, clay_frac=0.02, loam_frac=0.05, om_frac=0.15 * om_top,
                    theta_sat=theta_sat - 0.04, vg_alpha=alpha * 1.3, vg_lambda=0.5,
                    vg_n=n + 0.10, theta_res=0.035),
    )
    return SoilType(code=301 + index, horizons=horizons)


def soil_library() -> list[SoilType]:
    """All 32 profiles, interleaved peat/sand: 201, 301, 202, 302, ..."""
    out: list[SoilType] = []
    for i in range(N_PER_FAMILY):
        out.append(make_peat_soil(i))
        out.append(make_sand_soil(i))
    return out


def soil_by_code(code: int) -> SoilType:
    """Look up a library profile by its code."""
    if 201 <= code <= 216:
        return make_peat_soil(code - 201)
    if 301 <= code <= 316:
        return make_sand_soil(code - 301)
    raise ValidationError(f"unknown soil code {code} (library has 201-216 and 301-316)")
