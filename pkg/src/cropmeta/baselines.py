"""Benchmark models: expert linear regression and the data-driven network.

The linear regression uses four hand-picked features (cultivar earliness,
sowing day, mean daily precipitation and mean daily temperature over the
May to August window, days of year 121..243 inclusive) plus an intercept,
fitted by ordinary least squares on the normal equations.

The data-driven baseline is the same network architecture as the
metamodel, trained from fresh initialization on target data only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from cropmeta.cropsim.types import ManagementPlan, WeatherSeries
from cropmeta.datagen.dataset import SampleSet
from cropmeta.datagen.normalize import Normalizer
from cropmeta.errors import ValidationError
from cropmeta.tensornet.network import NetworkSpec, Parameters, init_parameters
from cropmeta.training import TrainConfig, TrainReport, train

LR_WINDOW = (121, 243)  # May 1 .. Aug 31, non-leap day-of-year numbering
LR_FEATURE_NAMES = (
    "earliness", "sowing_doy", "mean_precip", "mean_daily_temp", "intercept",
)


@dataclass(frozen=True)
class LRFeatureRow:
    """One observation's regression features."""

    earliness: float
    sowing_doy: float
    mean_precip: float
    mean_daily_temp: float

    def as_vector(self) -> np.ndarray:
        vec = np.array([self.earliness, self.sowing_doy, self.mean_precip,
                        self.mean_daily_temp, 1.0])
        if not np.all(np.isfinite(vec)):
            raise ValidationError("regression features must be finite")
        return vec


def extract_lr_features(weather: WeatherSeries, mgmt: ManagementPlan) -> LRFeatureRow:
    """Features for one scenario; seasonal means over days 121..243."""
    lo, hi = LR_WINDOW
    if weather.days[0].doy > lo or weather.days[-1].doy < hi:
        raise ValidationError(
            f"weather for location {weather.location_id}, year {weather.year} "
            f"does not cover days {lo}..{hi}")
    rain_sum = 0.0
    temp_sum = 0.0
    for doy in range(lo, hi + 1):
        day = weather.day(doy)
        rain_sum += day.rain
        temp_sum += 0.5 * (day.tmax + day.tmin)
    n_days = hi - lo + 1
    return LRFeatureRow(
        earliness=mgmt.earliness,
        sowing_doy=float(mgmt.sowing_doy),
        mean_precip=rain_sum / n_days,
        mean_daily_temp=temp_sum / n_days,
    )


@dataclass(frozen=True)
class LRModel:
    """Fitted least-squares coefficients, one per feature name."""

    coefficients: np.ndarray
    feature_names: tuple[str, ...] = LR_FEATURE_NAMES

    def __post_init__(self):
        if self.coefficients.shape != (len(self.feature_names),):
            raise ValidationError(
                f"expected {len(self.feature_names)} coefficients, "
                f"got shape {self.coefficients.shape}")
        if not np.all(np.isfinite(self.coefficients)):
            raise ValidationError("coefficients must be finite")

    def predict(self, design: np.ndarray) -> np.ndarray:
        design = np.asarray(design, dtype=np.float64)
        if design.ndim == 1:
            design = design[None]
        if design.shape[1] != len(self.coefficients):
            raise ValidationError(
                f"design matrix has {design.shape[1]} columns, "
                f"model expects {len(self.coefficients)}")
        return design @ self.coefficients

    def to_json(self, path: str | Path) -> None:
        named = dict(zip(self.feature_names, (float(c) for c in self.coefficients)))
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(named, fh, indent=2, sort_keys=True)
            fh.write("\n")


def design_matrix(rows: list[LRFeatureRow]) -> np.ndarray:
    return np.stack([row.as_vector() for row in rows])


def fit_ols(design: np.ndarray, targets: np.ndarray,
            feature_names: tuple[str, ...] = LR_FEATURE_NAMES) -> LRModel:
    """Least squares via normal equations, with an explicit rank check."""
    design = np.asarray(design, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if design.ndim != 2:
        raise ValidationError("design matrix must be two-dimensional")
    n, k = design.shape
    if k != len(feature_names):
        raise ValidationError(
            f"design matrix has {k} columns but {len(feature_names)} feature names")
    if targets.shape != (n,):
        raise ValidationError(f"targets must have shape ({n},), got {targets.shape}")
    if n < k:
        raise ValidationError(f"need at least {k} rows to fit {k} coefficients, got {n}")
    rank = int(np.linalg.matrix_rank(design))
    if rank < k:
        raise ValidationError(
            f"design matrix is rank-deficient (rank {rank} < {k} features)")
    gram = design.T @ design
    beta = np.linalg.solve(gram, design.T @ targets)
    return LRModel(coefficients=beta, feature_names=feature_names)


def build_data_driven_baseline(
    spec: NetworkSpec, data: SampleSet, config: TrainConfig,
) -> tuple[Parameters, TrainReport, Normalizer]:
    """Same architecture, fresh Glorot init from config.seed, no pretraining."""
    params = init_parameters(spec, config.seed)
    return train(spec, params, data, config)
