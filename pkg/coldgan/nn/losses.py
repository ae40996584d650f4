"""Binary cross-entropy with clamped logs."""

from __future__ import annotations

import numpy as np

from coldgan.errors import ShapeError

EPSILON = 1e-7


def _check(prediction: np.ndarray, target: np.ndarray) -> None:
    if prediction.shape != target.shape:
        raise ShapeError(f"prediction {prediction.shape} and target {target.shape} differ in shape")
    if prediction.size == 0:
        raise ShapeError("bce of an empty vector is undefined")


def bce(prediction: np.ndarray, target: np.ndarray) -> float:
    """Mean of -[t log p + (1 - t) log(1 - p)] with p clamped to [EPSILON, 1 - EPSILON]."""

    prediction = np.asarray(prediction, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    _check(prediction, target)
    clamped = np.clip(prediction, EPSILON, 1.0 - EPSILON)
    return float(np.mean(-(target * np.log(clamped) + (1.0 - target) * np.log(1.0 - clamped))))


def bce_grad(prediction: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Gradient of :func:`bce` with respect to ``prediction`` (zero where clamped)."""

    prediction = np.asarray(prediction, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    _check(prediction, target)
    clamped = np.clip(prediction, EPSILON, 1.0 - EPSILON)
    inside = (prediction >= EPSILON) & (prediction <= 1.0 - EPSILON)
    grad = (-target / clamped + (1.0 - target) / (1.0 - clamped)) / prediction.size
    return np.where(inside, grad, 0.0)
