"""Cross-validation splits, transfer experiment, and pseudo-observation runs."""

import numpy as np
import pytest

import cropmeta.experiments.transfer as transfer_mod
from cropmeta.cropsim.simulation import DEFAULT_PARAMS
from cropmeta.datagen.dataset import SampleSet, generate_dataset, split_by_soil_domain
from cropmeta.datagen.scenarios import build_factorial
from cropmeta.datagen.soils import soil_library
from cropmeta.datagen.weather import SyntheticWeatherStore
from cropmeta.errors import ExperimentError, ValidationError
from cropmeta.experiments.pseudoreal import (
    CROP_MODEL,
    DATA_DRIVEN,
    LINEAR_REGRESSION,
    METAMODEL,
    PSEUDO_NOISE_SIGMA,
    build_pseudo_observations,
    perturbed_sim_params,
    run_pseudo_real_experiment,
)
from cropmeta.experiments.splits import loocv_splits_by_year
from cropmeta.experiments.transfer import (
    TransferExperimentConfig,
    run_transfer_experiment,
)
from cropmeta.tensornet.modelio import Model
from cropmeta.tensornet.network import NetworkSpec, init_parameters
from cropmeta.training import TrainConfig, train


def fabricated_years(year_labels) -> SampleSet:
    n = len(year_labels)
    return SampleSet(
        temporal=np.zeros((n, 6, 210), dtype=np.float32),
        scalars=np.zeros((n, 3), dtype=np.float32),
        soil=np.zeros((n, 7, 120), dtype=np.float32),
        targets=np.arange(n, dtype=np.float32),
        location=np.zeros(n, dtype=np.int32),
        year=np.asarray(year_labels, dtype=np.int32),
        soil_code=np.full(n, 201, dtype=np.int32),
    )


@pytest.fixture(scope="module")
def domain_data():
    """Small dual-domain dataset: 4 peat and 4 sand soils, 96 samples."""
    library = soil_library()
    soils = ([s for s in library if s.code < 300][:4]
             + [s for s in library if s.code >= 300][:4])
    scenarios = build_factorial(7, (0, 1), (2000, 2001, 2002), soils, 2)
    return generate_dataset(scenarios, SyntheticWeatherStore(master_seed=7), soils)


def test_loocv_folds_partition_by_year():
    rng = np.random.default_rng(0)
    labels = rng.permutation(np.repeat(np.arange(2015, 2021), 5))
    folds = loocv_splits_by_year(fabricated_years(labels))
    assert [year for _, _, year in folds] == list(range(2015, 2021))
    seen = np.concatenate([test for _, test, _ in folds])
    assert sorted(seen.tolist()) == list(range(30))
    for train_idx, test_idx, year in folds:
        assert np.all(labels[test_idx] == year)
        assert np.all(labels[train_idx] != year)
        assert len(train_idx) + len(test_idx) == 30
        assert not set(train_idx.tolist()) & set(test_idx.tolist())


def test_loocv_single_year_rejected():
    with pytest.raises(ValidationError):
        loocv_splits_by_year(fabricated_years([2015] * 8))


def test_transfer_config_validation():
    with pytest.raises(ValidationError):
        TransferExperimentConfig(finetune_sizes=(200, 50))
    with pytest.raises(ValidationError):
        TransferExperimentConfig(finetune_sizes=(5, 50))
    with pytest.raises(ValidationError):
        TransferExperimentConfig(seeds=())


def test_transfer_requires_enough_domain_samples(domain_data):
    config = TransferExperimentConfig(
        pretrain_size=10_000, holdout_size=20, finetune_sizes=(10,), seeds=(1,))
    with pytest.raises(ValidationError, match="peat"):
        run_transfer_experiment(domain_data, config)


def tiny_transfer_config():
    return TransferExperimentConfig(
        pretrain_size=30,
        holdout_size=20,
        finetune_sizes=(10, 16),
        seeds=(1,),
        split_seed=0,
        pretrain_config=TrainConfig(seed=0, max_epochs=3, batch_size=16),
        finetune_config=TrainConfig(seed=0, max_epochs=2, batch_size=8),
    )


def test_transfer_grid_structure_and_determinism(domain_data, monkeypatch):
    config = tiny_transfer_config()
    result = run_transfer_experiment(domain_data, config)

    # one unadapted row (size 0) plus one row per model and size, per seed
    meta_sizes = sorted(r.finetune_size for r in result.rows if r.model == "metamodel")
    dd_sizes = sorted(r.finetune_size for r in result.rows if r.model == "data_driven")
    assert meta_sizes == [0, 10, 16]
    assert dd_sizes == [10, 16]
    assert result.holdout_n == 20
    assert all(r.n == 20 for r in result.rows)
    assert all(r.rmse >= 0 for r in result.rows)

    assert result.mean_rmse("metamodel", 0) == pytest.approx(
        [r.rmse for r in result.rows
         if r.model == "metamodel" and r.finetune_size == 0][0])
    with pytest.raises(ValidationError):
        result.mean_rmse("data_driven", 0)

    summary = result.summary()
    assert set(summary["models"]) == {"metamodel", "data_driven"}
    assert set(summary["models"]["metamodel"]) == {"0", "10", "16"}
    assert set(summary["models"]["data_driven"]) == {"10", "16"}
    per = summary["models"]["metamodel"]["16"]
    assert per["per_seed_rmse"] == [result.mean_rmse("metamodel", 16)]

    assert set(result.scatter) == {"metamodel", "data_driven"}
    for pred, obs in result.scatter.values():
        assert pred.shape == obs.shape == (20,)
        assert pred.dtype == obs.dtype == np.float32

    # rerun with a spy on fine_tune: identical rows, and the smaller
    # fine-tuning subset is a prefix of the larger one within a seed
    captured = []
    real_fine_tune = transfer_mod.fine_tune

    def spy(model, data, config):
        captured.append(data)
        return real_fine_tune(model, data, config)

    monkeypatch.setattr(transfer_mod, "fine_tune", spy)
    again = run_transfer_experiment(domain_data, config)
    assert again.rows == result.rows
    assert len(captured) == 2
    small, large = captured
    assert (len(small), len(large)) == (10, 16)
    np.testing.assert_array_equal(small.targets, large.targets[:10])
    np.testing.assert_array_equal(small.soil_code, large.soil_code[:10])


def test_pseudo_observations_reproducible_and_yearly(sand_soil):
    store = SyntheticWeatherStore(master_seed=3)
    pseudo = build_pseudo_observations(5, store, sand_soil,
                                       years=(2015, 2016, 2017), n=9)
    assert len(pseudo.data) == 9
    assert pseudo.years() == {2015, 2016, 2017}
    assert np.unique(pseudo.data.year).tolist() == [2015, 2016, 2017]
    assert pseudo.lr_design.shape == (9, 5)
    assert np.all(pseudo.sim_predictions > 0)
    again = build_pseudo_observations(5, store, sand_soil,
                                      years=(2015, 2016, 2017), n=9)
    np.testing.assert_array_equal(pseudo.data.targets, again.data.targets)
    np.testing.assert_array_equal(pseudo.sim_predictions, again.sim_predictions)


def test_pseudo_observations_are_biased_upward_of_plain_simulator(sand_soil):
    # reduced RUE and a higher dry-matter fraction both lower fresh yield,
    # so the plain simulator should overpredict the perturbed observations
    store = SyntheticWeatherStore(master_seed=3)
    pseudo = build_pseudo_observations(5, store, sand_soil,
                                       years=(2015, 2016), n=12)
    assert np.mean(pseudo.sim_predictions - pseudo.data.targets) > 0
    params = perturbed_sim_params()
    assert params.rue < DEFAULT_PARAMS.rue
    assert params.dry_matter_fraction > DEFAULT_PARAMS.dry_matter_fraction
    assert PSEUDO_NOISE_SIGMA > 0


def test_pseudo_observation_count_validated(sand_soil):
    store = SyntheticWeatherStore(master_seed=3)
    with pytest.raises(ValidationError):
        build_pseudo_observations(5, store, sand_soil, years=(2015, 2016, 2017), n=2)


def test_pseudo_real_leakage_guard(sand_soil):
    store = SyntheticWeatherStore(master_seed=3)
    pseudo = build_pseudo_observations(5, store, sand_soil, years=(2015, 2016), n=20)
    spec = NetworkSpec(include_soil=False)
    pretrained = Model(spec=spec, params=init_parameters(spec, 0), normalizer=None)
    with pytest.raises(ExperimentError, match="leakage"):
        run_pseudo_real_experiment(pretrained, range(1989, 2016), pseudo,
                                   seeds=(1,))


def test_pseudo_real_zero_noise_unperturbed_self_consistency(tiny_data, sand_soil):
    # observations generated by the unperturbed simulator without noise:
    # the plain-simulator column must reproduce them (up to float32 storage)
    # at least 3 distinct years per training fold, otherwise the two
    # weather-mean features are collinear with the intercept
    store = SyntheticWeatherStore(master_seed=3)
    pseudo = build_pseudo_observations(
        5, store, sand_soil, years=(2015, 2016, 2017, 2018), n=24,
        obs_params=DEFAULT_PARAMS, noise_sigma=0.0)
    obs = pseudo.data.targets.astype(np.float64)
    np.testing.assert_allclose(pseudo.sim_predictions, obs, rtol=1e-6)

    spec = NetworkSpec(include_soil=False)
    params, _, normalizer = train(spec, init_parameters(spec, 0), tiny_data,
                                  TrainConfig(seed=0, max_epochs=1))
    pretrained = Model(spec=spec, params=params, normalizer=normalizer)
    result = run_pseudo_real_experiment(
        pretrained, range(1989, 2015), pseudo, seeds=(1,),
        finetune_config=TrainConfig(seed=0, max_epochs=1, batch_size=8))

    assert result.fold_years == (2015, 2016, 2017, 2018)
    models = sorted(set(r.model for r in result.rows))
    assert models == sorted([CROP_MODEL, METAMODEL, DATA_DRIVEN, LINEAR_REGRESSION])
    crop_rows = [r for r in result.rows if r.model == CROP_MODEL]
    assert len(crop_rows) == 1
    assert crop_rows[0].seed is None
    assert crop_rows[0].rmse < 1e-4
    assert abs(crop_rows[0].bias) < 1e-4
    assert abs(result.model_bias(CROP_MODEL)) < 1e-4
    for pred in result.predictions.values():
        assert pred.shape == (24,)
        assert np.all(np.isfinite(pred))

    summary = result.summary()
    assert summary["n"] == 24
    assert summary["models"][CROP_MODEL]["mean_rmse"] < 1e-4
    assert summary["models"][METAMODEL]["seeds"] == [1]
    assert summary["models"][LINEAR_REGRESSION]["seeds"] == []
