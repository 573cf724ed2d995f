"""Channel-wise standardization."""

import numpy as np
import pytest

from cropmeta.datagen.normalize import Normalizer


def fitted(rng, n=40):
    temporal = rng.normal(5.0, 2.0, size=(n, 6, 210))
    scalars = rng.normal(0.0, 3.0, size=(n, 3))
    soil = rng.normal(1.0, 0.5, size=(n, 7, 120))
    targets = rng.normal(40.0, 8.0, size=n)
    return Normalizer.fit(temporal, scalars, soil, targets), (temporal, scalars, soil, targets)


def test_two_sample_targets_map_to_plus_minus_one():
    rng = np.random.default_rng(0)
    _, (temporal, scalars, soil, _) = fitted(rng, n=2)
    norm = Normalizer.fit(temporal, scalars, soil, np.array([2.0, 4.0]))
    # mean 3, population std 1
    assert norm.target_mean == pytest.approx(3.0)
    assert norm.target_std == pytest.approx(1.0)
    np.testing.assert_allclose(norm.transform_target(np.array([2.0, 4.0])),
                               [-1.0, 1.0], atol=1e-12)


def test_transformed_moments_are_standard():
    rng = np.random.default_rng(1)
    norm, (temporal, scalars, soil, targets) = fitted(rng)
    t = norm.transform_temporal(temporal)
    # per-channel moments over (samples, time)
    np.testing.assert_allclose(t.mean(axis=(0, 2)), np.zeros(6), atol=1e-10)
    np.testing.assert_allclose(t.std(axis=(0, 2)), np.ones(6), atol=1e-10)
    s = norm.transform_scalars(scalars)
    np.testing.assert_allclose(s.mean(axis=0), np.zeros(3), atol=1e-10)
    g = norm.transform_soil(soil)
    np.testing.assert_allclose(g.std(axis=(0, 2)), np.ones(7), atol=1e-10)
    y = norm.transform_target(targets)
    assert y.mean() == pytest.approx(0.0, abs=1e-10)


def test_constant_channel_maps_to_zero():
    rng = np.random.default_rng(2)
    temporal = rng.normal(size=(10, 6, 210))
    temporal[:, 2, :] = 7.5
    scalars = rng.normal(size=(10, 3))
    soil = rng.normal(size=(10, 7, 120))
    targets = rng.normal(size=10)
    norm = Normalizer.fit(temporal, scalars, soil, targets)
    assert norm.temporal_std[2] == 1.0
    out = norm.transform_temporal(temporal)
    np.testing.assert_array_equal(out[:, 2, :], np.zeros((10, 210)))


def test_target_round_trip():
    rng = np.random.default_rng(3)
    norm, (_, _, _, targets) = fitted(rng)
    back = norm.inverse_target(norm.transform_target(targets))
    np.testing.assert_allclose(back, targets, atol=1e-9)


def test_dict_round_trip():
    rng = np.random.default_rng(4)
    norm, _ = fitted(rng)
    clone = Normalizer.from_dict(norm.to_dict())
    assert norm.equals(clone)
    other, _ = fitted(np.random.default_rng(5))
    assert not norm.equals(other)
