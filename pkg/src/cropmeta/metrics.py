"""Evaluation metrics and the per-evaluation report record."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cropmeta.errors import ValidationError


def _paired(predictions, observations) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(predictions, dtype=np.float64)
    o = np.asarray(observations, dtype=np.float64)
    if p.ndim != 1 or o.ndim != 1:
        raise ValidationError("metrics expect one-dimensional inputs")
    if p.shape != o.shape:
        raise ValidationError(f"length mismatch: {p.shape[0]} predictions, "
                              f"{o.shape[0]} observations")
    if p.size == 0:
        raise ValidationError("metrics need at least one pair")
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(o))):
        raise ValidationError("metrics require finite inputs")
    return p, o


def rmse(predictions, observations) -> float:
    """Root mean squared error, same unit as the inputs."""
    p, o = _paired(predictions, observations)
    diff = p - o
    return float(np.sqrt(np.mean(diff * diff)))


def bias(predictions, observations) -> float:
    """Mean signed error (prediction minus observation)."""
    p, o = _paired(predictions, observations)
    return float(np.mean(p - o))


def pearson_r(predictions, observations) -> float:
    """Sample Pearson correlation; raises on constant input."""
    p, o = _paired(predictions, observations)
    if p.size < 2:
        raise ValidationError("pearson_r needs at least two pairs")
    dp = p - p.mean()
    do = o - o.mean()
    sp = float(np.sqrt(dp @ dp))
    so = float(np.sqrt(do @ do))
    if sp == 0.0 or so == 0.0:
        raise ValidationError("pearson_r is undefined for constant input")
    r = float((dp @ do) / (sp * so))
    return min(1.0, max(-1.0, r))


@dataclass(frozen=True)
class EvalReport:
    """Metrics of one model on one dataset, with the raw pairs."""

    model_id: str
    dataset_id: str
    rmse: float
    pearson_r: float | None
    n: int
    predictions: tuple[float, ...]
    observations: tuple[float, ...]

    def __post_init__(self):
        if self.n != len(self.predictions) or self.n != len(self.observations):
            raise ValidationError("EvalReport n must equal the number of pairs")
        if self.rmse < 0.0:
            raise ValidationError("rmse cannot be negative")
        if self.pearson_r is not None and not -1.0 <= self.pearson_r <= 1.0:
            raise ValidationError("pearson_r must lie in [-1, 1]")


def evaluate_predictions(model_id: str, dataset_id: str,
                         predictions, observations) -> EvalReport:
    """Build an EvalReport; correlation is None when undefined."""
    p, o = _paired(predictions, observations)
    try:
        r = pearson_r(p, o)
    except ValidationError:
        r = None
    return EvalReport(
        model_id=model_id,
        dataset_id=dataset_id,
        rmse=rmse(p, o),
        pearson_r=r,
        n=p.size,
        predictions=tuple(float(v) for v in p),
        observations=tuple(float(v) for v in o),
    )
