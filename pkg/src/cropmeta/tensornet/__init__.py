"""Minimal neural-network engine: layers, three-stream network, ADAM, model files."""

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
from cropmeta.tensornet.network import (
    ConvLayerDef,
    DenseLayerDef,
    NetworkSpec,
    Parameters,
    backward,
    forward,
    init_parameters,
)
from cropmeta.tensornet.adam import AdamState, adam_step
from cropmeta.tensornet.modelio import (
    MODEL_MAGIC,
    MODEL_VERSION,
    Model,
    load_model,
    save_model,
)

__all__ = [
    "avgpool1d_backward", "avgpool1d_forward", "conv1d_backward",
    "conv1d_forward", "dense_backward", "dense_forward", "mse_loss",
    "relu_backward", "relu_forward", "ConvLayerDef", "DenseLayerDef",
    "NetworkSpec", "Parameters", "backward", "forward", "init_parameters",
    "AdamState", "adam_step", "MODEL_MAGIC", "MODEL_VERSION", "Model",
    "load_model", "save_model",
]
