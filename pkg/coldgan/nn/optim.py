"""Adam optimiser over named parameter arrays."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping

import numpy as np

from coldgan.errors import ShapeError


@dataclass
class AdamState:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    first_moment: Dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: Dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def for_parameters(cls, params: Mapping[str, np.ndarray], learning_rate: float = 1e-3, **kwargs: float) -> "AdamState":
        return cls(
            learning_rate=learning_rate,
            first_moment={name: np.zeros_like(value) for name, value in params.items()},
            second_moment={name: np.zeros_like(value) for name, value in params.items()},
            **kwargs,
        )

    def hyperparameters(self) -> Dict[str, float]:
        return {
            "learning_rate": self.learning_rate,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "epsilon": self.epsilon,
            "step": self.step,
        }


def adam_step(params: Mapping[str, np.ndarray], gradients: Mapping[str, np.ndarray], state: AdamState) -> None:
    """Bias-corrected Adam update, applied to ``params`` in place."""

    if set(params) != set(gradients) or set(params) != set(state.first_moment):
        raise ShapeError("parameters, gradients and optimiser state name different tensors")
    for name, value in params.items():
        if gradients[name].shape != value.shape or state.first_moment[name].shape != value.shape:
            raise ShapeError(f"shape mismatch for {name}: {value.shape} vs {gradients[name].shape}")

    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step
    for name, value in params.items():
        grad = gradients[name]
        m = state.first_moment[name]
        v = state.second_moment[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * (grad * grad)
        value -= state.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + state.epsilon)
