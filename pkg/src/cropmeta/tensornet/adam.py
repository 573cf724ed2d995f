"""ADAM optimizer with bias correction and layer freezing."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cropmeta.tensornet.network import Parameters


@dataclass
class AdamState:
    """First/second moment estimates and the shared step counter."""

    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def for_parameters(cls, params: Parameters, learning_rate: float = 0.001) -> "AdamState":
        return cls(
            learning_rate=learning_rate,
            m={k: np.zeros_like(p) for k, p in params.values.items()},
            v={k: np.zeros_like(p) for k, p in params.values.items()},
        )


def adam_step(params: Parameters, grads: dict[str, np.ndarray],
              state: AdamState) -> None:
    """One in-place update: θ ← θ − lr·m̂/(√v̂ + ε). Frozen layers untouched."""
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    corr1 = 1.0 - b1 ** state.t
    corr2 = 1.0 - b2 ** state.t
    for key, value in params.values.items():
        layer = key.rsplit(".", 1)[0]
        if not params.is_trainable(layer):
            continue
        g = grads[key]
        m = state.m[key]
        v = state.v[key]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        m_hat = m / corr1
        v_hat = v / corr2
        value -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
