"""File ingestion and export for simulator inputs.

Formats:

* weather: CSV with header ``doy,radiation,rain,tmax,tmin``, one file per
  location-year;
* soil: JSON, either a single soil record or a list of them (a library);
* management: JSON mirroring :class:`~cropmeta.cropsim.types.ManagementPlan`.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path

from cropmeta.errors import DataFormatError, ValidationError
from cropmeta.cropsim.types import (
    ManagementPlan,
    SoilHorizon,
    SoilType,
    WeatherDay,
    WeatherSeries,
)

WEATHER_COLUMNS = ("doy", "radiation", "rain", "tmax", "tmin")


def read_weather_csv(path: str | Path, location_id: int, year: int) -> WeatherSeries:
    """Parse one location-year weather file; errors carry the line number."""
    path = Path(path)
    days = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("empty weather file", str(path), 1) from None
        if tuple(h.strip() for h in header) != WEATHER_COLUMNS:
            raise DataFormatError(
                f"expected header {','.join(WEATHER_COLUMNS)}, got {','.join(header)}",
                str(path),
                1,
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 5:
                raise DataFormatError(f"expected 5 fields, got {len(row)}", str(path), lineno)
            try:
                day = WeatherDay(
                    doy=int(row[0]),
                    radiation=float(row[1]),
                    rain=float(row[2]),
                    tmax=float(row[3]),
                    tmin=float(row[4]),
                )
            except (ValueError, ValidationError) as exc:
                raise DataFormatError(str(exc), str(path), lineno) from None
            days.append(day)
    try:
        return WeatherSeries(location_id=location_id, year=year, days=tuple(days))
    except ValidationError as exc:
        raise DataFormatError(str(exc), str(path)) from None


def write_weather_csv(series: WeatherSeries, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(WEATHER_COLUMNS)
        for d in series.days:
            writer.writerow([d.doy, repr(d.radiation), repr(d.rain), repr(d.tmax), repr(d.tmin)])


def weather_csv_name(location_id: int, year: int) -> str:
    return f"{location_id}_{year}.csv"


def _soil_from_dict(obj: dict, path: str) -> SoilType:
    try:
        horizons = tuple(SoilHorizon(**h) for h in obj["horizons"])
        return SoilType(code=int(obj["code"]), horizons=horizons)
    except (KeyError, TypeError, ValueError, ValidationError) as exc:
        raise DataFormatError(f"bad soil record: {exc}", path) from None


def read_soil_json(path: str | Path) -> list[SoilType]:
    """Read a soil file; returns a list even when it holds a single record."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"invalid JSON: {exc.msg}", str(path), exc.lineno) from None
    records = obj if isinstance(obj, list) else [obj]
    return [_soil_from_dict(rec, str(path)) for rec in records]


def write_soil_json(soils: list[SoilType] | SoilType, path: str | Path) -> None:
    path = Path(path)
    if isinstance(soils, SoilType):
        payload = asdict(soils)
    else:
        payload = [asdict(s) for s in soils]
    path.write_text(json.dumps(payload, indent=2) + "\n")


def read_management_json(path: str | Path) -> ManagementPlan:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"invalid JSON: {exc.msg}", str(path), exc.lineno) from None
    try:
        return ManagementPlan(
            sowing_doy=int(obj["sowing_doy"]),
            n_events=tuple((int(d), float(a)) for d, a in obj.get("n_events", [])),
            irrigation_events=tuple(
                (int(d), float(a)) for d, a in obj.get("irrigation_events", [])
            ),
            earliness=float(obj.get("earliness", 0.5)),
            max_rooting_depth=float(obj.get("max_rooting_depth", 50.0)),
        )
    except (KeyError, TypeError, ValueError, ValidationError) as exc:
        raise DataFormatError(f"bad management record: {exc}", str(path)) from None


def write_management_json(mgmt: ManagementPlan, path: str | Path) -> None:
    Path(path).write_text(json.dumps(asdict(mgmt), indent=2) + "\n")
