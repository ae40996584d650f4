"""Elementwise activations and their derivatives."""

from __future__ import annotations

from enum import Enum

import numpy as np


class Activation(str, Enum):
    SIGMOID = "sigmoid"
    RELU = "relu"
    IDENTITY = "identity"


def sigmoid(x: np.ndarray | float) -> np.ndarray:
    """Logistic function, evaluated without overflow for large ``|x|``."""

    x = np.asarray(x, dtype=np.float64)
    z = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + z), z / (1.0 + z))


def relu(x: np.ndarray | float) -> np.ndarray:
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def activate(kind: Activation, z: np.ndarray) -> np.ndarray:
    if kind is Activation.SIGMOID:
        return sigmoid(z)
    if kind is Activation.RELU:
        return relu(z)
    return z


def derivative(kind: Activation, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    """d activation / d z, given the pre-activation ``z`` and its output ``a``."""

    if kind is Activation.SIGMOID:
        return a * (1.0 - a)
    if kind is Activation.RELU:
        return (z > 0).astype(np.float64)
    return np.ones_like(z)
