"""Weight initialisation."""

from __future__ import annotations

import math
from typing import Tuple

import numpy as np


def init_glorot(shape: Tuple[int, int], rng: np.random.Generator) -> np.ndarray:
    """Glorot-uniform ``(fan_out, fan_in)`` matrix in +-sqrt(6 / (fan_in + fan_out))."""

    fan_out, fan_in = shape
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)
