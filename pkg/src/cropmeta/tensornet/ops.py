"""Primitive differentiable layer operations.

All operations work on float64 arrays, either unbatched (matching the
shapes in their docstrings) or with a leading batch axis. Convolution is
valid cross-correlation with stride 1 and no padding; pooling windows are
non-overlapping and a trailing remainder is discarded; the ReLU
subgradient at exactly zero is zero.

Backward functions take the upstream gradient and the forward inputs and
return gradients with exactly the shapes of the corresponding inputs.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from cropmeta.errors import ValidationError


def _batched(x: np.ndarray, ndim: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == ndim - 1:
        return x[None], True
    if x.ndim != ndim:
        raise ValidationError(f"expected a {ndim - 1}D or {ndim}D array, got shape {x.shape}")
    return x, False


def conv1d_forward(x: np.ndarray, weights: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Valid cross-correlation: (Cin, L) x (Cout, Cin, k) -> (Cout, L - k + 1)."""
    x, squeeze = _batched(x, 3)
    weights = np.asarray(weights, dtype=np.float64)
    bias = np.asarray(bias, dtype=np.float64)
    if weights.ndim != 3 or bias.shape != (weights.shape[0],):
        raise ValidationError(
            f"conv weights must be (Cout, Cin, k) with bias (Cout,), "
            f"got {weights.shape} and {bias.shape}")
    c_out, c_in, k = weights.shape
    if x.shape[1] != c_in:
        raise ValidationError(f"input has {x.shape[1]} channels, weights expect {c_in}")
    if x.shape[2] < k:
        raise ValidationError(f"input length {x.shape[2]} shorter than kernel {k}")
    windows = sliding_window_view(x, k, axis=2)  # (B, Cin, Lout, k)
    out = np.einsum("bdik,cdk->bci", windows, weights, optimize=True)
    out += bias[None, :, None]
    return out[0] if squeeze else out


def conv1d_backward(
    grad_out: np.ndarray, x: np.ndarray, weights: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients (d_input, d_weights, d_bias) of conv1d_forward."""
    x, squeeze = _batched(x, 3)
    grad_out, _ = _batched(grad_out, 3)
    weights = np.asarray(weights, dtype=np.float64)
    c_out, c_in, k = weights.shape
    windows = sliding_window_view(x, k, axis=2)
    grad_w = np.einsum("bci,bdij->cdj", grad_out, windows, optimize=True)
    grad_b = grad_out.sum(axis=(0, 2))
    padded = np.pad(grad_out, ((0, 0), (0, 0), (k - 1, k - 1)))
    go_windows = sliding_window_view(padded, k, axis=2)  # (B, Cout, L, k)
    grad_x = np.einsum("bctj,cdj->bdt", go_windows, weights[:, :, ::-1], optimize=True)
    if squeeze:
        grad_x = grad_x[0]
    return grad_x, grad_w, grad_b


def avgpool1d_forward(x: np.ndarray, window: int) -> np.ndarray:
    """Non-overlapping mean pooling: (C, L) -> (C, L // window)."""
    x, squeeze = _batched(x, 3)
    if window < 1:
        raise ValidationError(f"pool window must be >= 1, got {window}")
    if window > x.shape[2]:
        raise ValidationError(f"pool window {window} exceeds input length {x.shape[2]}")
    n_out = x.shape[2] // window
    out = x[:, :, : n_out * window].reshape(x.shape[0], x.shape[1], n_out, window)
    out = out.mean(axis=3)
    return out[0] if squeeze else out


def avgpool1d_backward(grad_out: np.ndarray, x: np.ndarray, window: int) -> np.ndarray:
    """Gradient of avgpool1d_forward w.r.t. its input."""
    x, squeeze = _batched(x, 3)
    grad_out, _ = _batched(grad_out, 3)
    n_out = x.shape[2] // window
    grad_x = np.zeros_like(x)
    grad_x[:, :, : n_out * window] = np.repeat(grad_out / window, window, axis=2)
    return grad_x[0] if squeeze else grad_x


def dense_forward(x: np.ndarray, weights: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Affine map: (n,) x (m, n) + (m,) -> (m,)."""
    x, squeeze = _batched(x, 2)
    weights = np.asarray(weights, dtype=np.float64)
    bias = np.asarray(bias, dtype=np.float64)
    if weights.ndim != 2 or bias.shape != (weights.shape[0],):
        raise ValidationError(
            f"dense weights must be (m, n) with bias (m,), got {weights.shape} and {bias.shape}")
    if x.shape[1] != weights.shape[1]:
        raise ValidationError(f"input size {x.shape[1]} does not match weights {weights.shape}")
    out = x @ weights.T + bias
    return out[0] if squeeze else out


def dense_backward(
    grad_out: np.ndarray, x: np.ndarray, weights: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients (d_input, d_weights, d_bias) of dense_forward."""
    x, squeeze = _batched(x, 2)
    grad_out, _ = _batched(grad_out, 2)
    weights = np.asarray(weights, dtype=np.float64)
    grad_w = grad_out.T @ x
    grad_b = grad_out.sum(axis=0)
    grad_x = grad_out @ weights
    if squeeze:
        grad_x = grad_x[0]
    return grad_x, grad_w, grad_b


def relu_forward(x: np.ndarray) -> np.ndarray:
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def relu_backward(grad_out: np.ndarray, x: np.ndarray) -> np.ndarray:
    # subgradient at exactly 0 is 0
    return np.asarray(grad_out) * (np.asarray(x) > 0.0)


def mse_loss(predictions: np.ndarray, targets: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean squared error over the batch and its gradient w.r.t. predictions."""
    predictions = np.asarray(predictions, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if predictions.shape != targets.shape:
        raise ValidationError(
            f"predictions {predictions.shape} and targets {targets.shape} differ in shape")
    if predictions.size == 0:
        raise ValidationError("mse_loss needs at least one element")
    diff = predictions - targets
    loss = float(np.mean(diff * diff))
    grad = 2.0 * diff / diff.size
    return loss, grad
