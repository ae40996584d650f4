"""Dense layers, multi-layer perceptrons and hand-derived backprop.

Weights are stored ``(out, in)``. Inputs may be a single vector or a batch of
row vectors; parameter gradients of a batch are summed over its rows, so the
caller folds any mean into ``output_gradient``.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from coldgan.errors import NumericError, ShapeError

from .activations import Activation, activate, derivative
from .initializers import init_glorot


@dataclass
class DenseLayer:
    weights: np.ndarray
    bias: np.ndarray
    activation: Activation = Activation.IDENTITY

    def __post_init__(self) -> None:
        self.activation = Activation(self.activation)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise ShapeError(f"weights {self.weights.shape} and bias {self.bias.shape} do not agree")
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias).all()):
            raise NumericError("layer parameters must be finite")

    @property
    def in_dim(self) -> int:
        return int(self.weights.shape[1])

    @property
    def out_dim(self) -> int:
        return int(self.weights.shape[0])


@dataclass
class ForwardCache:
    """Per-layer inputs, pre-activations and outputs of one forward pass."""

    inputs: List[np.ndarray] = field(default_factory=list)
    pre: List[np.ndarray] = field(default_factory=list)
    post: List[np.ndarray] = field(default_factory=list)
    single: bool = False


@dataclass
class Mlp:
    layers: List[DenseLayer]

    def __post_init__(self) -> None:
        if not self.layers:
            raise ShapeError("an MLP needs at least one layer")
        for index, (left, right) in enumerate(zip(self.layers, self.layers[1:])):
            if left.out_dim != right.in_dim:
                raise ShapeError(f"layer {index} outputs {left.out_dim} but layer {index + 1} expects {right.in_dim}")

    @classmethod
    def build(
        cls,
        sizes: Sequence[int],
        hidden_activation: Activation | str,
        output_activation: Activation | str,
        rng: np.random.Generator,
    ) -> "Mlp":
        """Glorot weights, zero biases; ``sizes`` lists every width from input to output."""

        if len(sizes) < 2:
            raise ShapeError("sizes must list at least an input and an output width")
        layers = []
        last = len(sizes) - 2
        for index, (fan_in, fan_out) in enumerate(zip(sizes, sizes[1:])):
            layers.append(
                DenseLayer(
                    weights=init_glorot((fan_out, fan_in), rng),
                    bias=np.zeros(fan_out),
                    activation=Activation(output_activation if index == last else hidden_activation),
                )
            )
        return cls(layers)

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim

    def parameters(self) -> Dict[str, np.ndarray]:
        """Live parameter arrays keyed ``layer{i}.weight`` / ``layer{i}.bias``."""

        params: Dict[str, np.ndarray] = {}
        for index, layer in enumerate(self.layers):
            params[f"layer{index}.weight"] = layer.weights
            params[f"layer{index}.bias"] = layer.bias
        return params

    def copy(self) -> "Mlp":
        return copy.deepcopy(self)

    def describe(self) -> Dict[str, object]:
        return {
            "sizes": [self.in_dim] + [layer.out_dim for layer in self.layers],
            "activations": [layer.activation.value for layer in self.layers],
        }


def forward(net: Mlp, x: np.ndarray) -> Tuple[np.ndarray, ForwardCache]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = x[np.newaxis, :] if single else x
    if batch.ndim != 2 or batch.shape[1] != net.in_dim:
        raise ShapeError(f"input of shape {x.shape} does not match in-dimension {net.in_dim}")
    if not np.isfinite(batch).all():
        raise NumericError("non-finite input to layer 0")

    cache = ForwardCache(single=single)
    current = batch
    for index, layer in enumerate(net.layers):
        z = current @ layer.weights.T + layer.bias
        a = activate(layer.activation, z)
        if not np.isfinite(a).all():
            raise NumericError(f"non-finite activation in layer {index}")
        cache.inputs.append(current)
        cache.pre.append(z)
        cache.post.append(a)
        current = a
    return (current[0] if single else current), cache


def backward(
    net: Mlp,
    cache: ForwardCache,
    output_gradient: np.ndarray,
) -> Tuple[Dict[str, np.ndarray], np.ndarray]:
    """Reverse-mode gradients of ``sum(output * output_gradient)``.

    Returns parameter gradients keyed like :meth:`Mlp.parameters` and the
    gradient with respect to the forward input.
    """

    if len(cache.post) != len(net.layers):
        raise ShapeError("cache does not come from a forward pass through this network")
    grad = np.asarray(output_gradient, dtype=np.float64)
    if cache.single:
        grad = grad[np.newaxis, :] if grad.ndim == 1 else grad
    if grad.shape != cache.post[-1].shape:
        raise ShapeError(f"output gradient {np.shape(output_gradient)} does not match output {cache.post[-1].shape}")

    grads: Dict[str, np.ndarray] = {}
    for index in reversed(range(len(net.layers))):
        layer = net.layers[index]
        dz = grad * derivative(layer.activation, cache.pre[index], cache.post[index])
        grads[f"layer{index}.weight"] = dz.T @ cache.inputs[index]
        grads[f"layer{index}.bias"] = dz.sum(axis=0)
        grad = dz @ layer.weights
    ordered = {name: grads[name] for name in net.parameters()}
    return ordered, (grad[0] if cache.single else grad)
