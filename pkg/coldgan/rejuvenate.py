"""Time-based rejuvenation: turn a warm rating vector back into a cold one.

The ``i``-th rated item (0-based, ascending timestamp) survives with probability

    p(i) = p_min + (p_max - p_min) * exp(-alpha * i / count)

so the earliest ratings are the most likely to stay. ``random_uniform`` mode
keeps every rating with the same probability instead.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Mapping

import numpy as np

from coldgan.data.vectors import RatingVector
from coldgan.errors import ConfigError, DomainError


class RejuvenationMode(str, Enum):
    TIME_BASED = "time_based"
    RANDOM_UNIFORM = "random_uniform"


@dataclass(frozen=True)
class RejuvenationConfig:
    p_min: float = 0.1
    p_max: float = 0.9
    alpha: float = 2.0
    mode: RejuvenationMode = RejuvenationMode.TIME_BASED
    random_keep_prob: float = 0.5

    def __post_init__(self) -> None:
        if not isinstance(self.mode, RejuvenationMode):
            try:
                object.__setattr__(self, "mode", RejuvenationMode(self.mode))
            except ValueError as exc:
                raise ConfigError(f"rejuvenation.mode must be one of {[m.value for m in RejuvenationMode]}") from exc
        if not 0.0 <= self.p_min < self.p_max <= 1.0:
            raise ConfigError(f"need 0 <= p_min < p_max <= 1, got p_min={self.p_min}, p_max={self.p_max}")
        if not self.alpha > 0.0:
            raise ConfigError(f"rejuvenation.alpha must be > 0, got {self.alpha}")
        if not 0.0 < self.random_keep_prob <= 1.0:
            raise ConfigError(f"rejuvenation.random_keep_prob must lie in (0, 1], got {self.random_keep_prob}")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RejuvenationConfig":
        return cls(**dict(data))

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["mode"] = self.mode.value
        return data


def retention_probability(i: int, count: int, cfg: RejuvenationConfig) -> float:
    """Probability that the rating at rank ``i`` of ``count`` is retained."""

    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    if not 0 <= i < count:
        raise DomainError(f"rank {i} outside [0, {count})")
    return cfg.p_min + (cfg.p_max - cfg.p_min) * math.exp(-cfg.alpha * i / count)


def retention_profile(count: int, cfg: RejuvenationConfig) -> np.ndarray:
    """Retention probability for every rank ``0..count-1`` at once."""

    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    ranks = np.arange(count, dtype=np.float64)
    return cfg.p_min + (cfg.p_max - cfg.p_min) * np.exp(-cfg.alpha * ranks / count)


def _keep_by_draw(w: RatingVector, probabilities: np.ndarray, rng: np.random.Generator) -> RatingVector:
    if w.count == 0:
        raise DomainError("cannot rejuvenate an empty rating vector")
    kept = rng.random(w.count) < probabilities
    if not kept.any():
        kept[0] = True  # the earliest rating always survives
    return w.restrict([item for item, keep in zip(w.rated_order, kept) if keep])


def rejuvenate(w: RatingVector, cfg: RejuvenationConfig, rng: np.random.Generator) -> RatingVector:
    """Drop ratings independently with the time-based retention probability."""

    if w.count == 0:
        raise DomainError("cannot rejuvenate an empty rating vector")
    return _keep_by_draw(w, retention_profile(w.count, cfg), rng)


def rejuvenate_random(w: RatingVector, cfg: RejuvenationConfig, rng: np.random.Generator) -> RatingVector:
    """Drop ratings independently with the constant ``random_keep_prob``."""

    return _keep_by_draw(w, np.full(w.count, cfg.random_keep_prob), rng)


def apply_rejuvenation(w: RatingVector, cfg: RejuvenationConfig, rng: np.random.Generator) -> RatingVector:
    if cfg.mode is RejuvenationMode.RANDOM_UNIFORM:
        return rejuvenate_random(w, cfg, rng)
    return rejuvenate(w, cfg, rng)
