"""Linear-regression baseline and the data-driven network baseline."""

import json

import numpy as np
import pytest

from cropmeta.baselines import (
    LR_FEATURE_NAMES,
    LR_WINDOW,
    LRFeatureRow,
    build_data_driven_baseline,
    design_matrix,
    extract_lr_features,
    fit_ols,
)
from cropmeta.cropsim.types import ManagementPlan
from cropmeta.errors import ValidationError
from cropmeta.tensornet.network import NetworkSpec, init_parameters
from cropmeta.training import TrainConfig, train

from helpers import constant_weather, weather_with


def test_window_constants():
    assert LR_WINDOW == (121, 243)
    assert LR_WINDOW[1] - LR_WINDOW[0] + 1 == 123
    assert len(LR_FEATURE_NAMES) == 5
    assert LR_FEATURE_NAMES[-1] == "intercept"


def test_constant_weather_feature_means(mgmt):
    weather = constant_weather(rain=2.0, tmax=20.0, tmin=10.0)
    row = extract_lr_features(weather, mgmt)
    assert row.mean_precip == pytest.approx(2.0)
    assert row.mean_daily_temp == pytest.approx(15.0)
    assert row.earliness == mgmt.earliness
    assert row.sowing_doy == mgmt.sowing_doy


def test_sawtooth_rain_mean_by_independent_summation(mgmt):
    base = constant_weather(rain=0.0)
    overrides = {doy: 4.0 for doy in range(LR_WINDOW[0], LR_WINDOW[1] + 1)
                 if doy % 2 == 1}
    weather = weather_with(base, rain=overrides)
    row = extract_lr_features(weather, mgmt)
    expected = sum(4.0 for doy in range(121, 244) if doy % 2 == 1) / 123.0
    assert row.mean_precip == pytest.approx(expected, abs=1e-12)


def test_feature_vector_has_intercept(mgmt):
    row = extract_lr_features(constant_weather(), mgmt)
    vec = row.as_vector()
    assert vec.shape == (5,)
    assert vec[-1] == 1.0


def test_ols_hand_example():
    # x = [0, 1, 2], y = [1, 3, 5]: slope 2, intercept 1
    design = np.array([[0.0, 1.0], [1.0, 1.0], [2.0, 1.0]])
    targets = np.array([1.0, 3.0, 5.0])
    model = fit_ols(design, targets, feature_names=("slope", "intercept"))
    np.testing.assert_allclose(model.coefficients, [2.0, 1.0], atol=1e-12)


def test_ols_exact_fit_residuals():
    rng = np.random.default_rng(0)
    design = np.column_stack([rng.normal(size=(30, 4)), np.ones(30)])
    truth = np.array([1.5, -2.0, 0.25, 4.0, 10.0])
    targets = design @ truth
    model = fit_ols(design, targets)
    np.testing.assert_allclose(model.coefficients, truth, atol=1e-10)
    np.testing.assert_allclose(model.predict(design) - targets,
                               np.zeros(30), atol=1e-10)


def test_ols_residuals_orthogonal_to_design():
    rng = np.random.default_rng(1)
    design = np.column_stack([rng.normal(size=(60, 4)), np.ones(60)])
    targets = rng.normal(size=60)
    model = fit_ols(design, targets)
    residuals = targets - model.predict(design)
    np.testing.assert_allclose(design.T @ residuals, np.zeros(5), atol=1e-8)


def test_ols_matches_lstsq_reference():
    rng = np.random.default_rng(2)
    for _ in range(20):
        n, k = int(rng.integers(10, 100)), 5
        design = np.column_stack([rng.normal(size=(n, k - 1)), np.ones(n)])
        targets = rng.normal(size=n)
        model = fit_ols(design, targets)
        reference = np.linalg.lstsq(design, targets, rcond=None)[0]
        np.testing.assert_allclose(model.coefficients, reference, atol=1e-6)


def test_ols_duplicated_column_rank_error():
    rng = np.random.default_rng(3)
    col = rng.normal(size=30)
    design = np.column_stack([col, col, np.ones(30)])
    with pytest.raises(ValidationError, match="rank"):
        fit_ols(design, rng.normal(size=30), feature_names=("a", "b", "c"))


def test_ols_input_validation():
    with pytest.raises(ValidationError):
        fit_ols(np.ones((3, 5)), np.ones(3))  # fewer rows than columns
    with pytest.raises(ValidationError):
        fit_ols(np.ones((6, 2)), np.ones(5), feature_names=("a", "b"))


def test_lr_model_predicts_and_serializes(tmp_path):
    rng = np.random.default_rng(4)
    rows = [LRFeatureRow(earliness=float(rng.uniform(0, 1)),
                         sowing_doy=float(rng.integers(100, 136)),
                         mean_precip=float(rng.uniform(0, 5)),
                         mean_daily_temp=float(rng.uniform(10, 20)))
            for _ in range(12)]
    design = design_matrix(rows)
    assert design.shape == (12, 5)
    targets = design @ np.array([0.1, 2.0, 0.5, 1.0, 3.0])
    model = fit_ols(design, targets)
    np.testing.assert_allclose(model.predict(design), targets, atol=1e-8)
    out = tmp_path / "lr.json"
    model.to_json(out)
    doc = json.loads(out.read_text())
    assert set(doc) == set(LR_FEATURE_NAMES)
    np.testing.assert_allclose(
        [doc[name] for name in LR_FEATURE_NAMES], model.coefficients, atol=1e-12)


def test_data_driven_baseline_is_thin_train_wrapper(tiny_data):
    spec = NetworkSpec()
    config = TrainConfig(seed=11, max_epochs=2)
    params, report, norm = build_data_driven_baseline(spec, tiny_data, config)
    expected_params, expected_report, expected_norm = train(
        spec, init_parameters(spec, config.seed), tiny_data, config)
    assert report == expected_report
    for key in params.values:
        np.testing.assert_array_equal(params.values[key],
                                      expected_params.values[key])
    assert norm.equals(expected_norm)
