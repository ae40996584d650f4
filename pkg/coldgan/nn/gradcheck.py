"""Central finite-difference gradient checking."""

from __future__ import annotations

from typing import Callable, Dict, Mapping, Tuple

import numpy as np

LossAndGrad = Callable[[], Tuple[float, Mapping[str, np.ndarray]]]


DEFAULT_FLOOR = 1e-8


def relative_error(analytic: float, numeric: float, floor: float = DEFAULT_FLOOR) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def grad_check(
    loss_fn: LossAndGrad,
    params: Mapping[str, np.ndarray],
    h: float = 1e-5,
    floor: float = DEFAULT_FLOOR,
) -> float:
    """Largest elementwise relative error between analytic and numeric gradients.

    ``loss_fn`` evaluates the loss and its analytic gradients at the current
    contents of ``params``; each element is perturbed in place and restored.
    ``floor`` bounds the denominator for entries whose true gradient is near zero,
    where central differences carry about 1e-11 of cancellation noise.
    """

    _, analytic = loss_fn()
    analytic_copy: Dict[str, np.ndarray] = {name: np.array(grad, dtype=np.float64) for name, grad in analytic.items()}
    worst = 0.0
    for name, value in params.items():
        flat = value.reshape(-1)
        if not np.shares_memory(flat, value):
            raise ValueError(f"parameter {name} is not contiguous")
        grad = analytic_copy[name].reshape(-1)
        for index in range(flat.size):
            original = flat[index]
            flat[index] = original + h
            plus, _ = loss_fn()
            flat[index] = original - h
            minus, _ = loss_fn()
            flat[index] = original
            numeric = (plus - minus) / (2.0 * h)
            worst = max(worst, relative_error(float(grad[index]), numeric, floor))
    return worst
