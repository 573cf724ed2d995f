"""Three-stream convolutional network: spec, parameters, forward, backward.

The architecture has a temporal stream (two conv/pool stages over daily
weather and management curves), a scalar stream (two dense layers over
crop and field scalars), an optional soil stream (one conv/pool stage
over the depth profile) and a dense head applied to the concatenated
stream outputs. Hidden layers use ReLU; the final dense layer is linear.

With the shipped input encoding the stream outputs are 56 (temporal),
20 (scalar) and 20 (soil), so the head sees 96 features, or 76 when the
soil stream is excluded.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from cropmeta.errors import TrainingError, ValidationError
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


@dataclass(frozen=True)
class ConvLayerDef:
    name: str
    c_in: int
    c_out: int
    kernel: int
    pool: int


@dataclass(frozen=True)
class DenseLayerDef:
    name: str
    n_in: int
    n_out: int
    relu: bool


@dataclass(frozen=True)
class NetworkSpec:
    """Immutable architecture description."""

    temporal_channels: int = 6
    temporal_length: int = 210
    scalar_size: int = 3
    soil_channels: int = 7
    soil_depth: int = 120
    include_soil: bool = True
    temporal_conv: tuple[tuple[int, int, int], ...] = ((20, 3, 5), (7, 2, 5))
    scalar_dense: tuple[int, ...] = (20, 20)
    soil_conv: tuple[tuple[int, int, int], ...] = ((5, 5, 24),)
    head_dense: tuple[int, ...] = (25, 5, 1)

    def __post_init__(self):
        for name in ("temporal_channels", "temporal_length", "scalar_size",
                     "soil_channels", "soil_depth"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1")
        if not self.head_dense or self.head_dense[-1] != 1:
            raise ValidationError("head must end in a single output unit")
        # walking the streams validates conv/pool feasibility
        self.layers()

    def _conv_stack(self, prefix: str, channels: int, length: int,
                    stack: tuple[tuple[int, int, int], ...]):
        layers = []
        for i, (filters, kernel, pool) in enumerate(stack):
            if kernel > length:
                raise ValidationError(
                    f"{prefix} conv{i}: kernel {kernel} exceeds input length {length}")
            length = length - kernel + 1
            if pool > length:
                raise ValidationError(
                    f"{prefix} conv{i}: pool {pool} exceeds post-conv length {length}")
            layers.append(ConvLayerDef(f"{prefix}.conv{i}", channels, filters, kernel, pool))
            channels = filters
            length = length // pool
        return layers, channels * length

    def temporal_layers(self) -> tuple[list[ConvLayerDef], int]:
        return self._conv_stack("temporal", self.temporal_channels,
                                self.temporal_length, self.temporal_conv)

    def soil_layers(self) -> tuple[list[ConvLayerDef], int]:
        if not self.include_soil:
            return [], 0
        return self._conv_stack("soil", self.soil_channels, self.soil_depth,
                                self.soil_conv)

    def scalar_layers(self) -> tuple[list[DenseLayerDef], int]:
        layers = []
        n = self.scalar_size
        for i, units in enumerate(self.scalar_dense):
            layers.append(DenseLayerDef(f"scalar.dense{i}", n, units, relu=True))
            n = units
        return layers, n

    def head_layers(self) -> list[DenseLayerDef]:
        layers = []
        n = self.head_input_size()
        for i, units in enumerate(self.head_dense):
            last = i == len(self.head_dense) - 1
            layers.append(DenseLayerDef(f"head.dense{i}", n, units, relu=not last))
            n = units
        return layers

    def head_input_size(self) -> int:
        _, t = self.temporal_layers()
        _, s = self.scalar_layers()
        _, g = self.soil_layers()
        return t + s + g

    def layers(self) -> list:
        """All parameterized layers in deterministic order."""
        t_layers, _ = self.temporal_layers()
        s_layers, _ = self.scalar_layers()
        g_layers, _ = self.soil_layers()
        return [*t_layers, *s_layers, *g_layers, *self.head_layers()]

    def layer_names(self) -> list[str]:
        return [layer.name for layer in self.layers()]

    def without_soil(self) -> "NetworkSpec":
        return replace(self, include_soil=False)

    def to_dict(self) -> dict:
        return {
            "temporal_channels": self.temporal_channels,
            "temporal_length": self.temporal_length,
            "scalar_size": self.scalar_size,
            "soil_channels": self.soil_channels,
            "soil_depth": self.soil_depth,
            "include_soil": self.include_soil,
            "temporal_conv": [list(t) for t in self.temporal_conv],
            "scalar_dense": list(self.scalar_dense),
            "soil_conv": [list(t) for t in self.soil_conv],
            "head_dense": list(self.head_dense),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "NetworkSpec":
        try:
            return cls(
                temporal_channels=int(data["temporal_channels"]),
                temporal_length=int(data["temporal_length"]),
                scalar_size=int(data["scalar_size"]),
                soil_channels=int(data["soil_channels"]),
                soil_depth=int(data["soil_depth"]),
                include_soil=bool(data["include_soil"]),
                temporal_conv=tuple(tuple(int(v) for v in t) for t in data["temporal_conv"]),
                scalar_dense=tuple(int(v) for v in data["scalar_dense"]),
                soil_conv=tuple(tuple(int(v) for v in t) for t in data["soil_conv"]),
                head_dense=tuple(int(v) for v in data["head_dense"]),
            )
        except KeyError as exc:
            raise ValidationError(f"network spec dict is missing key {exc}") from exc


@dataclass
class Parameters:
    """Layer tensors plus per-layer trainable flags."""

    values: dict[str, np.ndarray]
    trainable: dict[str, bool] = field(default_factory=dict)

    def copy(self) -> "Parameters":
        return Parameters(
            values={k: v.copy() for k, v in self.values.items()},
            trainable=dict(self.trainable),
        )

    def layer_names(self) -> list[str]:
        seen = []
        for key in self.values:
            name = key.rsplit(".", 1)[0]
            if name not in seen:
                seen.append(name)
        return seen

    def is_trainable(self, layer: str) -> bool:
        return self.trainable.get(layer, True)

    def freeze_all_except(self, keep: list[str]) -> None:
        for name in self.layer_names():
            self.trainable[name] = name in keep

    def unfreeze_all(self) -> None:
        for name in self.layer_names():
            self.trainable[name] = True


def init_parameters(spec: NetworkSpec, seed: int) -> Parameters:
    """Glorot-uniform weights, zero biases, everything trainable."""
    rng = np.random.default_rng(seed)
    values: dict[str, np.ndarray] = {}
    trainable: dict[str, bool] = {}
    for layer in spec.layers():
        if isinstance(layer, ConvLayerDef):
            fan_in = layer.c_in * layer.kernel
            fan_out = layer.c_out * layer.kernel
            shape = (layer.c_out, layer.c_in, layer.kernel)
            bias = np.zeros(layer.c_out)
        else:
            fan_in, fan_out = layer.n_in, layer.n_out
            shape = (layer.n_out, layer.n_in)
            bias = np.zeros(layer.n_out)
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        values[layer.name + ".w"] = rng.uniform(-bound, bound, size=shape)
        values[layer.name + ".b"] = bias
        trainable[layer.name] = True
    return Parameters(values=values, trainable=trainable)


def _check_inputs(spec: NetworkSpec, temporal, scalars, soil):
    temporal = np.asarray(temporal, dtype=np.float64)
    scalars = np.asarray(scalars, dtype=np.float64)
    if temporal.ndim == 2:
        temporal = temporal[None]
    if scalars.ndim == 1:
        scalars = scalars[None]
    if temporal.shape[1:] != (spec.temporal_channels, spec.temporal_length):
        raise ValidationError(
            f"temporal input {temporal.shape[1:]} does not match spec "
            f"{(spec.temporal_channels, spec.temporal_length)}")
    if scalars.shape[1:] != (spec.scalar_size,):
        raise ValidationError(
            f"scalar input {scalars.shape[1:]} does not match spec ({spec.scalar_size},)")
    if temporal.shape[0] != scalars.shape[0]:
        raise ValidationError("temporal and scalar batches differ in size")
    if spec.include_soil:
        if soil is None:
            raise ValidationError("spec includes the soil stream but no soil input given")
        soil = np.asarray(soil, dtype=np.float64)
        if soil.ndim == 2:
            soil = soil[None]
        if soil.shape[1:] != (spec.soil_channels, spec.soil_depth):
            raise ValidationError(
                f"soil input {soil.shape[1:]} does not match spec "
                f"{(spec.soil_channels, spec.soil_depth)}")
        if soil.shape[0] != temporal.shape[0]:
            raise ValidationError("soil batch differs in size from temporal batch")
    else:
        soil = None
    return temporal, scalars, soil


def _conv_stream_forward(x, layer_defs, params, cache):
    for layer in layer_defs:
        w = params.values[layer.name + ".w"]
        b = params.values[layer.name + ".b"]
        z = conv1d_forward(x, w, b)
        a = relu_forward(z)
        cache.append((layer, x, z, a))
        x = avgpool1d_forward(a, layer.pool)
    return x


def _dense_stack_forward(x, layer_defs, params, cache):
    for layer in layer_defs:
        w = params.values[layer.name + ".w"]
        b = params.values[layer.name + ".b"]
        z = dense_forward(x, w, b)
        a = relu_forward(z) if layer.relu else z
        cache.append((layer, x, z))
        x = a
    return x


def _forward_with_cache(spec, params, temporal, scalars, soil):
    t_layers, t_size = spec.temporal_layers()
    s_layers, _ = spec.scalar_layers()
    g_layers, g_size = spec.soil_layers()

    t_cache: list = []
    s_cache: list = []
    g_cache: list = []
    t_out = _conv_stream_forward(temporal, t_layers, params, t_cache)
    s_out = _dense_stack_forward(scalars, s_layers, params, s_cache)
    parts = [t_out.reshape(t_out.shape[0], -1), s_out]
    if spec.include_soil:
        g_out = _conv_stream_forward(soil, g_layers, params, g_cache)
        parts.append(g_out.reshape(g_out.shape[0], -1))
    merged = np.concatenate(parts, axis=1)

    h_cache: list = []
    h_out = _dense_stack_forward(merged, spec.head_layers(), params, h_cache)
    pred = h_out[:, 0]
    cache = {
        "temporal": (t_cache, t_out.shape),
        "scalar": s_cache,
        "soil": (g_cache, None if not spec.include_soil else g_out.shape),
        "head": h_cache,
        "sizes": (t_size, s_out.shape[1], g_size),
    }
    return pred, cache


def forward(spec: NetworkSpec, params: Parameters, temporal, scalars,
            soil=None) -> np.ndarray:
    """Batch predictions (targets in normalized space), shape (B,)."""
    temporal, scalars, soil = _check_inputs(spec, temporal, scalars, soil)
    pred, _ = _forward_with_cache(spec, params, temporal, scalars, soil)
    if not np.all(np.isfinite(pred)):
        raise TrainingError("non-finite prediction encountered in forward pass")
    return pred


def _zero_grads(params: Parameters) -> dict[str, np.ndarray]:
    return {k: np.zeros_like(v) for k, v in params.values.items()}


def _dense_stack_backward(grad, cache, params, grads):
    for layer, x, z in reversed(cache):
        if layer.relu:
            grad = relu_backward(grad, z)
        w = params.values[layer.name + ".w"]
        grad, gw, gb = dense_backward(grad, x, w)
        grads[layer.name + ".w"] += gw
        grads[layer.name + ".b"] += gb
    return grad


def _conv_stack_backward(grad, cache, params, grads):
    for layer, x, z, a in reversed(cache):
        grad = avgpool1d_backward(grad, a, layer.pool)
        grad = relu_backward(grad, z)
        w = params.values[layer.name + ".w"]
        grad, gw, gb = conv1d_backward(grad, x, w)
        grads[layer.name + ".w"] += gw
        grads[layer.name + ".b"] += gb
    return grad


def backward(spec: NetworkSpec, params: Parameters, temporal, scalars, soil,
             targets) -> tuple[float, dict[str, np.ndarray]]:
    """MSE loss and parameter gradients; frozen layers' gradients are zeroed."""
    temporal, scalars, soil = _check_inputs(spec, temporal, scalars, soil)
    targets = np.asarray(targets, dtype=np.float64)
    if targets.ndim == 0:
        targets = targets[None]
    if targets.shape != (temporal.shape[0],):
        raise ValidationError(
            f"targets must have shape ({temporal.shape[0]},), got {targets.shape}")

    pred, cache = _forward_with_cache(spec, params, temporal, scalars, soil)
    loss, grad_pred = mse_loss(pred, targets)
    if not np.isfinite(loss):
        raise TrainingError("non-finite loss encountered in backward pass")

    grads = _zero_grads(params)
    grad = _dense_stack_backward(grad_pred[:, None], cache["head"], params, grads)

    t_size, s_size, g_size = cache["sizes"]
    grad_t = grad[:, :t_size]
    grad_s = grad[:, t_size:t_size + s_size]
    t_cache, t_shape = cache["temporal"]
    _conv_stack_backward(grad_t.reshape(t_shape), t_cache, params, grads)
    _dense_stack_backward(grad_s, cache["scalar"], params, grads)
    if spec.include_soil:
        g_cache, g_shape = cache["soil"]
        grad_g = grad[:, t_size + s_size:]
        _conv_stack_backward(grad_g.reshape(g_shape), g_cache, params, grads)

    for layer, flag in params.trainable.items():
        if not flag:
            grads[layer + ".w"][:] = 0.0
            grads[layer + ".b"][:] = 0.0
    return loss, grads
