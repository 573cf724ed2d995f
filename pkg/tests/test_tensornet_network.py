"""Network assembly, initialization, forward/backward correctness."""

import numpy as np
import pytest

from cropmeta.errors import TrainingError, ValidationError
from cropmeta.tensornet.network import (
    NetworkSpec,
    backward,
    forward,
    init_parameters,
)

MINI = NetworkSpec(
    temporal_channels=2, temporal_length=20, scalar_size=3,
    soil_channels=2, soil_depth=16, include_soil=True,
    temporal_conv=((3, 3, 2), (2, 2, 2)), scalar_dense=(4,),
    soil_conv=((2, 3, 4),), head_dense=(5, 1),
)


def mini_inputs(rng, n=4, spec=MINI):
    t = rng.normal(size=(n, spec.temporal_channels, spec.temporal_length))
    s = rng.normal(size=(n, spec.scalar_size))
    g = rng.normal(size=(n, spec.soil_channels, spec.soil_depth)) if spec.include_soil else None
    y = rng.normal(size=n)
    return t, s, g, y


def test_default_head_input_size():
    # temporal: 210 -conv3-> 208 -pool5-> 41 -conv2-> 40 -pool5-> 8, x7 = 56
    # scalars: 20; soil: 120 -conv5-> 116 -pool24-> 4, x5 = 20
    assert NetworkSpec().head_input_size() == 96
    assert NetworkSpec(include_soil=False).head_input_size() == 76
    assert NetworkSpec().without_soil().head_input_size() == 76


def test_default_layer_names():
    assert NetworkSpec().layer_names() == [
        "temporal.conv0", "temporal.conv1",
        "scalar.dense0", "scalar.dense1",
        "soil.conv0",
        "head.dense0", "head.dense1", "head.dense2",
    ]
    assert "soil.conv0" not in NetworkSpec(include_soil=False).layer_names()


def test_spec_dict_round_trip():
    spec = MINI
    assert NetworkSpec.from_dict(spec.to_dict()) == spec


def test_spec_rejects_oversized_kernel():
    with pytest.raises(ValidationError):
        NetworkSpec(temporal_conv=((4, 300, 2),))


def test_init_deterministic_and_seed_sensitive():
    a = init_parameters(MINI, 7)
    b = init_parameters(MINI, 7)
    c = init_parameters(MINI, 8)
    for key in a.values:
        np.testing.assert_array_equal(a.values[key], b.values[key])
    assert any(not np.array_equal(a.values[k], c.values[k]) for k in a.values)


def test_init_glorot_bound_and_zero_bias():
    spec = NetworkSpec(scalar_size=3, scalar_dense=(20,))
    seen = []
    for seed in range(50):
        params = init_parameters(spec, seed)
        seen.append(params.values["scalar.dense0.w"].reshape(-1))
        np.testing.assert_array_equal(params.values["scalar.dense0.b"], np.zeros(20))
    draws = np.concatenate(seen)
    assert draws.size >= 10_000 * 0.3  # 50 seeds x 60 weights
    bound = np.sqrt(6.0 / 23.0)
    assert np.max(np.abs(draws)) <= bound
    assert np.max(np.abs(draws)) > bound * 0.98  # the bound is actually reached


def test_forward_shape_and_determinism(rng):
    params = init_parameters(MINI, 0)
    t, s, g, _ = mini_inputs(rng)
    out = forward(MINI, params, t, s, g)
    assert out.shape == (4,)
    np.testing.assert_array_equal(out, forward(MINI, params, t, s, g))


def test_forward_rejects_wrong_shapes(rng):
    params = init_parameters(MINI, 0)
    t, s, g, _ = mini_inputs(rng)
    with pytest.raises(ValidationError):
        forward(MINI, params, t[:, :, :-1], s, g)
    with pytest.raises(ValidationError):
        forward(MINI, params, t, s, None)  # soil required by the spec
    with pytest.raises(ValidationError):
        forward(MINI, params, t, s, g[:, :1, :])  # wrong soil channel count
    # a no-soil spec ignores a supplied soil block instead of failing
    no_soil = MINI.without_soil()
    p2 = init_parameters(no_soil, 0)
    np.testing.assert_array_equal(forward(no_soil, p2, t, s, g),
                                  forward(no_soil, p2, t, s, None))


def test_forward_rejects_non_finite(rng):
    params = init_parameters(MINI, 0)
    t, s, g, _ = mini_inputs(rng)
    t[0, 0, 0] = np.nan
    with pytest.raises(TrainingError):
        forward(MINI, params, t, s, g)


def test_batch_duplication_invariance(rng):
    params = init_parameters(MINI, 1)
    t, s, g, y = mini_inputs(rng)
    loss1, grads1 = backward(MINI, params, t, s, g, y)
    loss2, grads2 = backward(MINI, params, np.concatenate([t, t]),
                             np.concatenate([s, s]), np.concatenate([g, g]),
                             np.concatenate([y, y]))
    assert loss2 == pytest.approx(loss1, rel=1e-12)
    for key in grads1:
        np.testing.assert_allclose(grads2[key], grads1[key], atol=1e-12)


def test_zero_residual_means_zero_head_bias_gradient(rng):
    params = init_parameters(MINI, 2)
    t, s, g, _ = mini_inputs(rng)
    y = forward(MINI, params, t, s, g)
    loss, grads = backward(MINI, params, t, s, g, y)
    assert loss == 0.0
    np.testing.assert_array_equal(grads["head.dense1.b"], np.zeros(1))


def fd_worst_error(spec, params, t, s, g, y, grads, h=1e-5):
    def loss_at():
        pred = forward(spec, params, t, s, g)
        return float(np.mean((pred - y) ** 2))

    worst = 0.0
    for key, arr in params.values.items():
        flat = arr.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = loss_at()
            flat[i] = orig - h
            down = loss_at()
            flat[i] = orig
            fd = (up - down) / (2 * h)
            analytic = grads[key].reshape(-1)[i]
            rel = abs(analytic - fd) / max(1e-8, abs(analytic) + abs(fd))
            worst = max(worst, rel)
    return worst


def test_gradients_match_finite_differences(rng):
    params = init_parameters(MINI, 3)
    t, s, g, y = mini_inputs(rng)
    _, grads = backward(MINI, params, t, s, g, y)
    assert fd_worst_error(MINI, params, t, s, g, y, grads) < 1e-4


def test_gradients_match_finite_differences_deep_stacks(rng):
    # middle dense layers and a pool-1 conv stage are not exercised by MINI
    spec = NetworkSpec(
        temporal_channels=2, temporal_length=18, scalar_size=3,
        soil_channels=2, soil_depth=12, include_soil=True,
        temporal_conv=((3, 3, 1), (2, 2, 2)), scalar_dense=(4, 3),
        soil_conv=((2, 3, 3),), head_dense=(5, 3, 1),
    )
    params = init_parameters(spec, 6)
    # nonzero biases keep relu pre-activations off the kink, where the
    # zero-subgradient convention and a central difference legitimately differ
    for key, arr in params.values.items():
        if key.endswith(".b"):
            sign = rng.choice((-1.0, 1.0), size=arr.shape)
            params.values[key] = sign * rng.uniform(0.1, 0.4, size=arr.shape)
    t, s, g, y = mini_inputs(rng, spec=spec)
    _, grads = backward(spec, params, t, s, g, y)
    assert fd_worst_error(spec, params, t, s, g, y, grads) < 1e-4


def test_frozen_layer_gradients_are_zeroed(rng):
    params = init_parameters(MINI, 4)
    params.freeze_all_except(["head.dense0", "head.dense1"])
    t, s, g, y = mini_inputs(rng)
    _, grads = backward(MINI, params, t, s, g, y)
    np.testing.assert_array_equal(grads["temporal.conv0.w"],
                                  np.zeros_like(grads["temporal.conv0.w"]))
    np.testing.assert_array_equal(grads["scalar.dense0.b"],
                                  np.zeros_like(grads["scalar.dense0.b"]))
    assert np.any(grads["head.dense0.w"] != 0.0)


def test_backward_rejects_target_shape(rng):
    params = init_parameters(MINI, 5)
    t, s, g, y = mini_inputs(rng)
    with pytest.raises(ValidationError):
        backward(MINI, params, t, s, g, y[:-1])
