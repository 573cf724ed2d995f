"""Cross-domain transfer experiment: pretrain on peat, adapt to sand.

For every seed, a soil-blind network is pretrained on a fixed peat
subset, evaluated unadapted on a fixed sand hold-out (the size-0 row),
then fine-tuned on nested sand subsets of the configured sizes; a
data-driven baseline with identical architecture is trained from scratch
on each subset. All models are scored on the same hold-out.

Subset nesting (50 within 200 within 1000) comes from taking prefixes of
one per-seed permutation of the sand pool, which keeps the size axis
comparable within a seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from cropmeta.baselines import build_data_driven_baseline
from cropmeta.datagen.dataset import SampleSet, split_by_soil_domain
from cropmeta.errors import ValidationError
from cropmeta.metrics import evaluate_predictions
from cropmeta.tensornet.modelio import Model
from cropmeta.tensornet.network import NetworkSpec, init_parameters
from cropmeta.training import TrainConfig, fine_tune, train

METAMODEL = "metamodel"
DATA_DRIVEN = "data_driven"


@dataclass(frozen=True)
class TransferExperimentConfig:
    """Sizes, seeds and training template of the transfer grid."""

    pretrain_size: int = 10_000
    holdout_size: int = 17_000
    finetune_sizes: tuple[int, ...] = (50, 200, 1000)
    seeds: tuple[int, ...] = (1, 2, 3)
    split_seed: int = 0
    pretrain_config: TrainConfig = field(
        default_factory=lambda: TrainConfig(seed=0, max_epochs=120))
    finetune_config: TrainConfig = field(
        default_factory=lambda: TrainConfig(seed=0, max_epochs=300))

    def __post_init__(self):
        if self.pretrain_size < 10 or self.holdout_size < 1:
            raise ValidationError("pretrain_size and holdout_size must be positive")
        if not self.finetune_sizes or any(s < 10 for s in self.finetune_sizes):
            raise ValidationError("fine-tune sizes must each be >= 10")
        if list(self.finetune_sizes) != sorted(self.finetune_sizes):
            raise ValidationError("fine-tune sizes must be ascending")
        if not self.seeds:
            raise ValidationError("at least one seed is required")


@dataclass(frozen=True)
class TransferRow:
    """Hold-out metrics of one model variant under one seed."""

    seed: int
    model: str
    finetune_size: int
    rmse: float
    pearson_r: float | None
    n: int


@dataclass(frozen=True)
class TransferResult:
    rows: tuple[TransferRow, ...]
    holdout_n: int
    scatter: dict[str, tuple[np.ndarray, np.ndarray]]

    def mean_rmse(self, model: str, size: int) -> float:
        vals = [r.rmse for r in self.rows if r.model == model and r.finetune_size == size]
        if not vals:
            raise ValidationError(f"no rows for model {model!r} at size {size}")
        return float(np.mean(vals))

    def summary(self) -> dict:
        sizes = sorted(set(r.finetune_size for r in self.rows))
        out: dict = {"holdout_n": self.holdout_n, "models": {}}
        for model in (METAMODEL, DATA_DRIVEN):
            per_size = {}
            for size in sizes:
                vals = [r.rmse for r in self.rows
                        if r.model == model and r.finetune_size == size]
                if not vals:
                    continue
                per_size[str(size)] = {
                    "mean_rmse": float(np.mean(vals)),
                    "std_rmse": float(np.std(vals)),
                    "per_seed_rmse": [float(v) for v in vals],
                }
            out["models"][model] = per_size
        return out


def run_transfer_experiment(data: SampleSet,
                            config: TransferExperimentConfig) -> TransferResult:
    """Run the full seed x size grid on one synthetic dataset."""
    peat, sand = split_by_soil_domain(data)
    max_ft = max(config.finetune_sizes)
    if len(peat) < config.pretrain_size:
        raise ValidationError(
            f"peat domain has {len(peat)} samples, pretraining needs "
            f"{config.pretrain_size}")
    if len(sand) < config.holdout_size + max_ft:
        raise ValidationError(
            f"sand domain has {len(sand)} samples, hold-out plus fine-tuning "
            f"needs {config.holdout_size + max_ft}")

    split_rng = np.random.default_rng(config.split_seed)
    peat_order = split_rng.permutation(len(peat))
    sand_order = split_rng.permutation(len(sand))
    pretrain_set = peat.subset(peat_order[:config.pretrain_size])
    holdout = sand.subset(sand_order[:config.holdout_size])
    pool = sand.subset(sand_order[config.holdout_size:])

    spec = NetworkSpec(include_soil=False)
    rows: list[TransferRow] = []
    scatter: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    obs = holdout.targets.astype(np.float64)

    for seed in config.seeds:
        pre_cfg = replace(config.pretrain_config, seed=seed)
        params = init_parameters(spec, seed)
        pre_params, _, normalizer = train(spec, params, pretrain_set, pre_cfg)
        pretrained = Model(spec=spec, params=pre_params, normalizer=normalizer)

        pred0 = pretrained.predict(holdout.temporal, holdout.scalars)
        rep0 = evaluate_predictions(METAMODEL, "sand_holdout", pred0, obs)
        rows.append(TransferRow(seed, METAMODEL, 0, rep0.rmse, rep0.pearson_r, rep0.n))

        subset_rng = np.random.default_rng(seed)
        pool_order = subset_rng.permutation(len(pool))
        for size in config.finetune_sizes:
            subset = pool.subset(pool_order[:size])
            ft_cfg = replace(config.finetune_config, seed=seed)

            tuned, _ = fine_tune(pretrained, subset, ft_cfg)
            pred_ft = tuned.predict(holdout.temporal, holdout.scalars)
            rep_ft = evaluate_predictions(METAMODEL, "sand_holdout", pred_ft, obs)
            rows.append(TransferRow(seed, METAMODEL, size,
                                    rep_ft.rmse, rep_ft.pearson_r, rep_ft.n))

            dd_params, _, dd_norm = build_data_driven_baseline(spec, subset, ft_cfg)
            dd = Model(spec=spec, params=dd_params, normalizer=dd_norm)
            pred_dd = dd.predict(holdout.temporal, holdout.scalars)
            rep_dd = evaluate_predictions(DATA_DRIVEN, "sand_holdout", pred_dd, obs)
            rows.append(TransferRow(seed, DATA_DRIVEN, size,
                                    rep_dd.rmse, rep_dd.pearson_r, rep_dd.n))

            if size == max_ft:
                scatter[METAMODEL] = (pred_ft.astype(np.float32),
                                      obs.astype(np.float32))
                scatter[DATA_DRIVEN] = (pred_dd.astype(np.float32),
                                        obs.astype(np.float32))

    return TransferResult(rows=tuple(rows), holdout_n=len(holdout), scatter=scatter)
