"""Channel-wise standardisation of encoded samples.

Statistics are population moments (ddof 0) in float64, computed per
temporal channel, per scalar field, per soil channel and for the target.
Channels with zero variance keep their mean but get a standard deviation
of one, so constant inputs map to exactly zero instead of NaN.

A fitted normaliser travels with the model file: fine-tuning and
inference reuse the statistics of the pretraining corpus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cropmeta.errors import ValidationError


def _safe_std(values: np.ndarray, axis) -> np.ndarray:
    std = values.std(axis=axis, ddof=0)
    return np.where(std > 0.0, std, 1.0)


@dataclass(frozen=True)
class Normalizer:
    """Frozen per-channel means and standard deviations."""

    temporal_mean: np.ndarray
    temporal_std: np.ndarray
    scalar_mean: np.ndarray
    scalar_std: np.ndarray
    soil_mean: np.ndarray
    soil_std: np.ndarray
    target_mean: float
    target_std: float

    @classmethod
    def fit(cls, temporal: np.ndarray, scalars: np.ndarray, soil: np.ndarray,
            targets: np.ndarray) -> "Normalizer":
        """Compute statistics from (N, 6, L), (N, 3), (N, 7, D), (N,) arrays."""
        if temporal.ndim != 3 or scalars.ndim != 2 or soil.ndim != 3:
            raise ValidationError("normalizer expects batched temporal/scalar/soil arrays")
        if targets.ndim != 1:
            raise ValidationError("targets must be one-dimensional")
        temporal = np.asarray(temporal, dtype=np.float64)
        scalars = np.asarray(scalars, dtype=np.float64)
        soil = np.asarray(soil, dtype=np.float64)
        targets = np.asarray(targets, dtype=np.float64)
        t_std = targets.std(ddof=0)
        return cls(
            temporal_mean=temporal.mean(axis=(0, 2)),
            temporal_std=_safe_std(temporal, axis=(0, 2)),
            scalar_mean=scalars.mean(axis=0),
            scalar_std=_safe_std(scalars, axis=0),
            soil_mean=soil.mean(axis=(0, 2)),
            soil_std=_safe_std(soil, axis=(0, 2)),
            target_mean=float(targets.mean()),
            target_std=float(t_std if t_std > 0.0 else 1.0),
        )

    def transform_temporal(self, temporal: np.ndarray) -> np.ndarray:
        x = np.asarray(temporal, dtype=np.float64)
        return (x - self.temporal_mean[:, None]) / self.temporal_std[:, None]

    def transform_scalars(self, scalars: np.ndarray) -> np.ndarray:
        x = np.asarray(scalars, dtype=np.float64)
        return (x - self.scalar_mean) / self.scalar_std

    def transform_soil(self, soil: np.ndarray) -> np.ndarray:
        x = np.asarray(soil, dtype=np.float64)
        return (x - self.soil_mean[:, None]) / self.soil_std[:, None]

    def transform_target(self, targets: np.ndarray) -> np.ndarray:
        x = np.asarray(targets, dtype=np.float64)
        return (x - self.target_mean) / self.target_std

    def inverse_target(self, normalized: np.ndarray) -> np.ndarray:
        x = np.asarray(normalized, dtype=np.float64)
        return x * self.target_std + self.target_mean

    def to_dict(self) -> dict:
        return {
            "temporal_mean": self.temporal_mean.tolist(),
            "temporal_std": self.temporal_std.tolist(),
            "scalar_mean": self.scalar_mean.tolist(),
            "scalar_std": self.scalar_std.tolist(),
            "soil_mean": self.soil_mean.tolist(),
            "soil_std": self.soil_std.tolist(),
            "target_mean": self.target_mean,
            "target_std": self.target_std,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Normalizer":
        try:
            return cls(
                temporal_mean=np.asarray(data["temporal_mean"], dtype=np.float64),
                temporal_std=np.asarray(data["temporal_std"], dtype=np.float64),
                scalar_mean=np.asarray(data["scalar_mean"], dtype=np.float64),
                scalar_std=np.asarray(data["scalar_std"], dtype=np.float64),
                soil_mean=np.asarray(data["soil_mean"], dtype=np.float64),
                soil_std=np.asarray(data["soil_std"], dtype=np.float64),
                target_mean=float(data["target_mean"]),
                target_std=float(data["target_std"]),
            )
        except KeyError as exc:
            raise ValidationError(f"normalizer dict is missing key {exc}") from exc

    def equals(self, other: "Normalizer") -> bool:
        return (
            np.array_equal(self.temporal_mean, other.temporal_mean)
            and np.array_equal(self.temporal_std, other.temporal_std)
            and np.array_equal(self.scalar_mean, other.scalar_mean)
            and np.array_equal(self.scalar_std, other.scalar_std)
            and np.array_equal(self.soil_mean, other.soil_mean)
            and np.array_equal(self.soil_std, other.soil_std)
            and self.target_mean == other.target_mean
            and self.target_std == other.target_std
        )
