"""Soil water retention: van Genuchten curve and bucket-model limits.

Water content at a given suction follows the closed-form retention curve

    theta(h) = theta_res + (theta_sat - theta_res) * (1 + (alpha*h)^n)^-(1 - 1/n)

with ``h`` the pressure head (suction magnitude, cm). The m = 1 - 1/n
restriction is used throughout. Bucket limits are taken at the conventional
suctions pF 2.0 (field capacity) and pF 4.2 (wilting point).
"""

from __future__ import annotations

from cropmeta.errors import ValidationError
from cropmeta.cropsim.types import SoilType

#: Suction magnitudes (cm) for the two bucket limits.
FIELD_CAPACITY_HEAD_CM = 100.0     # pF 2.0
WILTING_POINT_HEAD_CM = 10.0**4.2  # pF 4.2, ~15849 cm


def vg_water_content(
    pressure_head_cm: float,
    theta_res: float,
    theta_sat: float,
    alpha: float,
    n: float,
) -> float:
    """Volumetric water content at a suction of ``pressure_head_cm``.

    Monotonically non-increasing in the head; equals ``theta_sat`` at h=0 and
    tends to ``theta_res`` as h grows.
    """
    if alpha <= 0.0:
        raise ValidationError(f"alpha must be positive, got {alpha}")
    if n <= 1.0:
        raise ValidationError(f"n must exceed 1, got {n}")
    if not 0.0 <= theta_res < theta_sat:
        raise ValidationError(
            f"need 0 <= theta_res < theta_sat, got {theta_res}, {theta_sat}"
        )
    if pressure_head_cm < 0.0:
        raise ValidationError(f"pressure head must be >= 0, got {pressure_head_cm}")
    m = 1.0 - 1.0 / n
    return theta_res + (theta_sat - theta_res) * (1.0 + (alpha * pressure_head_cm) ** n) ** (-m)


def derive_hydraulic_limits(soil: SoilType, layer_cm: float) -> tuple[float, float]:
    """(field_capacity, wilting_point) as volumetric contents at ``layer_cm`` depth.

    Field capacity is the retention curve at pF 2.0, wilting point at pF 4.2,
    evaluated for the horizon containing the layer. Raises on depths outside
    the profile.
    """
    h = soil.horizon_at(layer_cm)
    fc = vg_water_content(FIELD_CAPACITY_HEAD_CM, h.theta_res, h.theta_sat, h.vg_alpha, h.vg_n)
    wp = vg_water_content(WILTING_POINT_HEAD_CM, h.theta_res, h.theta_sat, h.vg_alpha, h.vg_n)
    return fc, wp


class SoilColumn:
    """Per-centimetre discretisation of a soil profile for the water bucket.

    Precomputes field capacity, wilting point and saturation per 1 cm cell
    plus cumulative storages (mm) so the simulator can evaluate bucket limits
    at fractional depths cheaply.
    """

    def __init__(self, soil: SoilType, depth_cm: float):
        if depth_cm <= 0 or depth_cm > soil.depth_cm:
            raise ValidationError(
                f"column depth {depth_cm} cm outside soil profile 0..{soil.depth_cm}"
            )
        self.soil = soil
        self.depth_cm = float(depth_cm)
        n_cells = int(depth_cm) + (1 if depth_cm != int(depth_cm) else 0)
        self.fc = []   # volumetric, per cm cell
        self.wp = []
        om = []
        for i in range(n_cells):
            mid = min(i + 0.5, soil.depth_cm)
            fc, wp = derive_hydraulic_limits(soil, mid)
            self.fc.append(fc)
            self.wp.append(wp)
            om.append(soil.horizon_at(mid).om_frac)
        # cumulative storage (mm) at whole-cm boundaries; 1 cm of theta is 10 mm
        self._fc_cum = [0.0]
        self._wp_cum = [0.0]
        for fc, wp in zip(self.fc, self.wp):
            self._fc_cum.append(self._fc_cum[-1] + 10.0 * fc)
            self._wp_cum.append(self._wp_cum[-1] + 10.0 * wp)
        #: mean organic-matter fraction of the top 30 cm (drives mineralization)
        top = om[: min(30, len(om))]
        self.topsoil_om_frac = sum(top) / len(top)

    def _cum_at(self, cum: list[float], theta: list[float], depth: float) -> float:
        if depth <= 0.0:
            return 0.0
        depth = min(depth, self.depth_cm)
        i = int(depth)
        if i >= len(theta):
            return cum[-1]
        return cum[i] + (depth - i) * 10.0 * theta[i]

    def field_capacity_mm(self, depth_cm: float) -> float:
        """Water stored between 0 and ``depth_cm`` when the column sits at pF 2.0."""
        return self._cum_at(self._fc_cum, self.fc, depth_cm)

    def wilting_point_mm(self, depth_cm: float) -> float:
        """Water stored between 0 and ``depth_cm`` at pF 4.2."""
        return self._cum_at(self._wp_cum, self.wp, depth_cm)
