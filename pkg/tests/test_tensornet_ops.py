"""Primitive layer operations against naive references."""

import numpy as np
import pytest

from cropmeta.tensornet.ops import (
    avgpool1d_backward,
    avgpool1d_forward,
    conv1d_backward,
    conv1d_forward,
    dense_backward,
    dense_forward,
    mse_loss,
    relu_backward,
    relu_forward,
)

from helpers import naive_avgpool1d, naive_conv1d


def test_conv_delta_kernel_selects_center():
    x = np.array([[[1.0, 2.0, 3.0, 4.0]]])
    w = np.array([[[0.0, 1.0, 0.0]]])
    b = np.zeros(1)
    np.testing.assert_array_equal(conv1d_forward(x, w, b), [[[2.0, 3.0]]])


def test_conv_box_kernel():
    x = np.array([[[1.0, 2.0, 3.0, 4.0]]])
    w = np.array([[[1.0, 1.0, 1.0]]])
    np.testing.assert_array_equal(conv1d_forward(x, w, np.zeros(1)), [[[6.0, 9.0]]])


def test_conv_zero_weights_yield_bias():
    x = np.random.default_rng(0).normal(size=(3, 4, 9))
    w = np.zeros((2, 4, 3))
    b = np.array([0.5, -1.5])
    out = conv1d_forward(x, w, b)
    np.testing.assert_array_equal(out[:, 0, :], np.full((3, 7), 0.5))
    np.testing.assert_array_equal(out[:, 1, :], np.full((3, 7), -1.5))


def test_conv_matches_naive_reference(rng):
    for _ in range(5):
        n, c_in, c_out, length, k = 2, 3, 4, 11, 3
        x = rng.normal(size=(n, c_in, length))
        w = rng.normal(size=(c_out, c_in, k))
        b = rng.normal(size=c_out)
        np.testing.assert_allclose(conv1d_forward(x, w, b), naive_conv1d(x, w, b),
                                   atol=1e-12)


def test_conv_is_cross_correlation_not_convolution():
    # an asymmetric kernel distinguishes the two conventions
    x = np.array([[[1.0, 0.0, 0.0]]])
    w = np.array([[[1.0, 2.0, 3.0]]])
    out = conv1d_forward(x, w, np.zeros(1))
    assert out[0, 0, 0] == 1.0  # flipped-kernel convolution would give 3


def test_conv_backward_matches_finite_differences(rng):
    n, c_in, c_out, length, k = 2, 2, 3, 8, 3
    x = rng.normal(size=(n, c_in, length))
    w = rng.normal(size=(c_out, c_in, k))
    b = rng.normal(size=c_out)
    grad_out = rng.normal(size=(n, c_out, length - k + 1))

    grad_x, grad_w, grad_b = conv1d_backward(grad_out, x, w)

    def loss(xx, ww, bb):
        return float(np.sum(conv1d_forward(xx, ww, bb) * grad_out))

    h = 1e-6
    for arr, grad in ((x, grad_x), (w, grad_w), (b, grad_b)):
        flat = arr.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = loss(x, w, b)
            flat[i] = orig - h
            down = loss(x, w, b)
            flat[i] = orig
            fd = (up - down) / (2 * h)
            assert grad.reshape(-1)[i] == pytest.approx(fd, abs=1e-5)


def test_pool_pairwise_means():
    x = np.array([[[1.0, 3.0, 5.0, 7.0]]])
    np.testing.assert_array_equal(avgpool1d_forward(x, 2), [[[2.0, 6.0]]])


def test_pool_drops_remainder():
    x = np.array([[[1.0, 3.0, 5.0]]])
    np.testing.assert_array_equal(avgpool1d_forward(x, 2), [[[2.0]]])


def test_pool_constant_input():
    x = np.full((2, 3, 10), 4.25)
    np.testing.assert_array_equal(avgpool1d_forward(x, 5), np.full((2, 3, 2), 4.25))


def test_pool_matches_naive_reference(rng):
    x = rng.normal(size=(3, 2, 13))
    np.testing.assert_allclose(avgpool1d_forward(x, 4), naive_avgpool1d(x, 4),
                               atol=1e-12)


def test_pool_backward_spreads_gradient():
    x = np.zeros((1, 1, 5))
    grad_out = np.array([[[6.0, 10.0]]])
    grad_x = avgpool1d_backward(grad_out, x, 2)
    # each pooled cell contributes 1/window; the dropped tail gets nothing
    np.testing.assert_array_equal(grad_x, [[[3.0, 3.0, 5.0, 5.0, 0.0]]])


def test_dense_identity():
    x = np.array([[1.0, -2.0, 3.0]])
    out = dense_forward(x, np.eye(3), np.zeros(3))
    np.testing.assert_array_equal(out, x)


def test_dense_hand_values():
    w = np.array([[1.0, 2.0], [3.0, 4.0]])
    x = np.array([[1.0, 1.0]])
    b = np.array([0.0, 1.0])
    np.testing.assert_array_equal(dense_forward(x, w, b), [[3.0, 8.0]])


def test_dense_zero_input_yields_bias():
    w = np.array([[1.0, 2.0], [3.0, 4.0]])
    b = np.array([-1.0, 2.0])
    np.testing.assert_array_equal(dense_forward(np.zeros((2, 2)), w, b),
                                  [[-1.0, 2.0], [-1.0, 2.0]])


def test_dense_backward_hand_values():
    x = np.array([[1.0, 2.0]])
    w = np.array([[1.0, -1.0], [0.5, 0.5]])
    grad_out = np.array([[1.0, 2.0]])
    grad_x, grad_w, grad_b = dense_backward(grad_out, x, w)
    np.testing.assert_array_equal(grad_x, [[1.0 * 1.0 + 2.0 * 0.5,
                                            1.0 * -1.0 + 2.0 * 0.5]])
    np.testing.assert_array_equal(grad_w, [[1.0, 2.0], [2.0, 4.0]])
    np.testing.assert_array_equal(grad_b, [1.0, 2.0])


def test_relu_clips_and_subgradient_zero_at_zero():
    x = np.array([[-1.0, 0.0, 2.0]])
    np.testing.assert_array_equal(relu_forward(x), [[0.0, 0.0, 2.0]])
    grad = relu_backward(np.ones_like(x), x)
    np.testing.assert_array_equal(grad, [[0.0, 0.0, 1.0]])


def test_mse_loss_and_gradient():
    pred = np.array([1.0, 2.0, 3.0])
    target = np.array([1.0, 1.0, 1.0])
    loss, grad = mse_loss(pred, target)
    assert loss == pytest.approx((0.0 + 1.0 + 4.0) / 3.0)
    np.testing.assert_allclose(grad, 2.0 * (pred - target) / 3.0)
    loss0, grad0 = mse_loss(target, target)
    assert loss0 == 0.0
    np.testing.assert_array_equal(grad0, np.zeros(3))


def test_batch_duplication_leaves_rows_unchanged(rng):
    x = rng.normal(size=(2, 3, 10))
    w = rng.normal(size=(4, 3, 3))
    b = rng.normal(size=4)
    single = conv1d_forward(x, w, b)
    doubled = conv1d_forward(np.concatenate([x, x]), w, b)
    np.testing.assert_array_equal(doubled[:2], single)
    np.testing.assert_array_equal(doubled[2:], single)
