"""Training loop: validation monitoring, plateau LR reduction, early stop.

Monitor semantics (shared by early stopping and LR reduction, each with
its own reference and counter): the first epoch establishes the reference
value and counts as one epoch without improvement; an improvement is
``val < reference - min_delta``, which updates the reference and resets
the counter; the LR counter additionally resets when a reduction fires.
Consequently a validation loss that never improves reduces the LR at
exactly epoch ``lr_patience`` and stops at exactly epoch ``es_patience``.

Weights are restored from the best-validation epoch (strict minimum,
earliest epoch on ties) when training ends.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from cropmeta.datagen.dataset import SampleSet
from cropmeta.datagen.normalize import Normalizer
from cropmeta.errors import ValidationError
from cropmeta.tensornet.adam import AdamState, adam_step
from cropmeta.tensornet.modelio import Model
from cropmeta.tensornet.network import NetworkSpec, Parameters, backward, forward

MIN_TRAIN_SAMPLES = 10


@dataclass(frozen=True)
class TrainConfig:
    """Optimization and monitoring constants."""

    seed: int
    initial_lr: float = 0.001
    es_min_delta: float = 0.001
    es_patience: int = 20
    lr_factor: float = 0.5
    lr_min_delta: float = 0.001
    lr_patience: int = 10
    max_epochs: int = 500
    batch_size: int = 32
    val_fraction: float = 0.2

    def __post_init__(self):
        if not 0.0 < self.lr_factor < 1.0:
            raise ValidationError(f"lr_factor must be in (0, 1), got {self.lr_factor}")
        if self.es_patience < 1 or self.lr_patience < 1:
            raise ValidationError("patience values must be >= 1")
        if not 0.0 < self.val_fraction < 1.0:
            raise ValidationError(f"val_fraction must be in (0, 1), got {self.val_fraction}")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")
        if self.max_epochs < 0:
            raise ValidationError("max_epochs must be >= 0")
        if self.initial_lr <= 0.0:
            raise ValidationError("initial_lr must be > 0")


@dataclass(frozen=True)
class MonitorEvent:
    """Outcome of one epoch's validation check."""

    epoch: int
    val_loss: float
    lr: float            # learning rate in effect during this epoch
    lr_reduced: bool     # reduction fired after this epoch
    stop: bool           # early stop fired after this epoch


class PlateauMonitor:
    """Early-stopping and LR-plateau bookkeeping, one epoch at a time."""

    def __init__(self, initial_lr: float, es_min_delta: float, es_patience: int,
                 lr_factor: float, lr_min_delta: float, lr_patience: int):
        self.current_lr = initial_lr
        self.es_min_delta = es_min_delta
        self.es_patience = es_patience
        self.lr_factor = lr_factor
        self.lr_min_delta = lr_min_delta
        self.lr_patience = lr_patience
        self.epoch = 0
        self._es_ref: float | None = None
        self._lr_ref: float | None = None
        self._es_wait = 0
        self._lr_wait = 0

    def update(self, val_loss: float) -> MonitorEvent:
        self.epoch += 1
        lr_during_epoch = self.current_lr

        if self._es_ref is None or val_loss < self._es_ref - self.es_min_delta:
            if self._es_ref is None:
                self._es_wait = 1
            else:
                self._es_wait = 0
            self._es_ref = val_loss
        else:
            self._es_wait += 1

        if self._lr_ref is None or val_loss < self._lr_ref - self.lr_min_delta:
            if self._lr_ref is None:
                self._lr_wait = 1
            else:
                self._lr_wait = 0
            self._lr_ref = val_loss
        else:
            self._lr_wait += 1

        reduced = False
        if self._lr_wait >= self.lr_patience:
            self.current_lr *= self.lr_factor
            self._lr_wait = 0
            reduced = True
        stop = self._es_wait >= self.es_patience
        return MonitorEvent(epoch=self.epoch, val_loss=val_loss, lr=lr_during_epoch,
                            lr_reduced=reduced, stop=stop)

    @classmethod
    def from_config(cls, config: TrainConfig) -> "PlateauMonitor":
        return cls(config.initial_lr, config.es_min_delta, config.es_patience,
                   config.lr_factor, config.lr_min_delta, config.lr_patience)


@dataclass(frozen=True)
class TrainReport:
    """Per-epoch history plus the restore-best outcome."""

    epochs_run: int
    best_epoch: int
    best_val_loss: float | None
    train_losses: tuple[float, ...]
    val_losses: tuple[float, ...]
    lrs: tuple[float, ...]

    def summary(self) -> dict:
        return {
            "epochs_run": self.epochs_run,
            "best_epoch": self.best_epoch,
            "best_val_loss": self.best_val_loss,
            "final_lr": self.lrs[-1] if self.lrs else None,
            "final_train_loss": self.train_losses[-1] if self.train_losses else None,
            "final_val_loss": self.val_losses[-1] if self.val_losses else None,
        }


def report_to_csv(report: TrainReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch,train_loss,val_loss,lr\n")
        for i in range(report.epochs_run):
            fh.write(f"{i + 1},{repr(report.train_losses[i])},"
                     f"{repr(report.val_losses[i])},{repr(report.lrs[i])}\n")


def report_to_json(report: TrainReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.summary(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _normalized_arrays(data: SampleSet, spec: NetworkSpec, normalizer: Normalizer):
    temporal = normalizer.transform_temporal(data.temporal.astype(np.float64))
    scalars = normalizer.transform_scalars(data.scalars.astype(np.float64))
    soil = None
    if spec.include_soil:
        soil = normalizer.transform_soil(data.soil.astype(np.float64))
    targets = normalizer.transform_target(data.targets.astype(np.float64))
    return temporal, scalars, soil, targets


def _val_loss(spec, params, temporal, scalars, soil, targets, chunk: int = 1024) -> float:
    total = 0.0
    n = len(targets)
    for lo in range(0, n, chunk):
        hi = lo + chunk
        batch_soil = soil[lo:hi] if soil is not None else None
        pred = forward(spec, params, temporal[lo:hi], scalars[lo:hi], batch_soil)
        diff = pred - targets[lo:hi]
        total += float(diff @ diff)
    return total / n


def train(
    spec: NetworkSpec,
    params: Parameters,
    data: SampleSet,
    config: TrainConfig,
    normalizer: Normalizer | None = None,
) -> tuple[Parameters, TrainReport, Normalizer]:
    """Optimize ``params`` on ``data``; returns best-epoch weights.

    When no normalizer is given, one is fitted on the training portion of
    the split (never on validation data). The same Normalizer is returned
    so callers can bundle it with the weights.
    """
    n = len(data)
    if n < MIN_TRAIN_SAMPLES:
        raise ValidationError(
            f"training needs at least {MIN_TRAIN_SAMPLES} samples, got {n}")
    rng = np.random.default_rng(config.seed)
    order = rng.permutation(n)
    n_val = max(1, int(round(config.val_fraction * n)))
    if n_val >= n:
        n_val = n - 1
    val_idx = order[:n_val]
    train_idx = order[n_val:]

    train_set = data.subset(train_idx)
    val_set = data.subset(val_idx)
    if normalizer is None:
        normalizer = Normalizer.fit(
            train_set.temporal.astype(np.float64),
            train_set.scalars.astype(np.float64),
            train_set.soil.astype(np.float64),
            train_set.targets.astype(np.float64),
        )
    xt, xs, xg, yt = _normalized_arrays(train_set, spec, normalizer)
    vt, vs, vg, vy = _normalized_arrays(val_set, spec, normalizer)

    params = params.copy()
    if config.max_epochs == 0:
        report = TrainReport(epochs_run=0, best_epoch=0, best_val_loss=None,
                             train_losses=(), val_losses=(), lrs=())
        return params, report, normalizer

    adam = AdamState.for_parameters(params, learning_rate=config.initial_lr)
    monitor = PlateauMonitor.from_config(config)
    n_train = len(train_idx)

    best_val = np.inf
    best_epoch = 0
    best_params = params.copy()
    train_hist: list[float] = []
    val_hist: list[float] = []
    lr_hist: list[float] = []

    for _epoch in range(1, config.max_epochs + 1):
        adam.learning_rate = monitor.current_lr
        perm = rng.permutation(n_train)
        loss_sum = 0.0
        for lo in range(0, n_train, config.batch_size):
            idx = perm[lo:lo + config.batch_size]
            batch_soil = xg[idx] if xg is not None else None
            loss, grads = backward(spec, params, xt[idx], xs[idx], batch_soil, yt[idx])
            adam_step(params, grads, adam)
            loss_sum += loss * len(idx)
        train_loss = loss_sum / n_train
        val_loss = _val_loss(spec, params, vt, vs, vg, vy)
        event = monitor.update(val_loss)

        if val_loss < best_val:
            best_val = val_loss
            best_epoch = event.epoch
            best_params = params.copy()
        train_hist.append(train_loss)
        val_hist.append(val_loss)
        lr_hist.append(event.lr)
        if event.stop:
            break

    report = TrainReport(
        epochs_run=len(train_hist),
        best_epoch=best_epoch,
        best_val_loss=float(best_val),
        train_losses=tuple(train_hist),
        val_losses=tuple(val_hist),
        lrs=tuple(lr_hist),
    )
    return best_params, report, normalizer


def head_finetune_layers(spec: NetworkSpec) -> list[str]:
    """The final two parameterized layers (the head's last two dense layers)."""
    return [layer.name for layer in spec.head_layers()[-2:]]


def fine_tune(model: Model, data: SampleSet, config: TrainConfig) -> tuple[Model, TrainReport]:
    """Continue training with all layers frozen except the last two.

    The pretrained normalizer travels unchanged: target data are scaled
    with the statistics of the pretraining corpus.
    """
    params = model.params.copy()
    params.freeze_all_except(head_finetune_layers(model.spec))
    tuned, report, normalizer = train(model.spec, params, data, config,
                                      normalizer=model.normalizer)
    return Model(spec=model.spec, params=tuned, normalizer=normalizer), report
