"""Top-k recommendation for a cold-start rating vector."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Tuple

import numpy as np

from coldgan.data.log import RATING_SCALE
from coldgan.data.vectors import RatingVector
from coldgan.errors import DomainError, ShapeError
from coldgan.gan.model import Generator, generate, normalize_ratings


@dataclass(frozen=True)
class RecommendationList:
    user: int
    items: Tuple[int, ...]
    scores: Tuple[float, ...]


class Scorer(Protocol):
    """Anything that scores all N items for a cold rating vector."""

    name: str

    def score(self, cold: RatingVector) -> np.ndarray:
        """Return one score per item; higher ranks first."""


class GeneratorScorer:
    """Scores items with the raw output of a trained generator."""

    name = "coldgan"

    def __init__(self, generator: Generator, rating_scale: float = RATING_SCALE[1]) -> None:
        self._generator = generator
        self._rating_scale = rating_scale

    def score(self, cold: RatingVector) -> np.ndarray:
        return generate(self._generator, normalize_ratings(cold, self._rating_scale))


def rank_items(scores: np.ndarray, cold: RatingVector, k: int, user: int = -1) -> RecommendationList:
    """Top ``k`` unrated items by score, ties broken by ascending item index."""

    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (cold.num_items,):
        raise ShapeError(f"expected {cold.num_items} scores, got shape {scores.shape}")
    pool = cold.num_items - cold.count
    if not 1 <= k <= pool:
        raise DomainError(f"k={k} outside [1, {pool}] unrated items")

    candidates = np.flatnonzero(cold.values == 0)
    candidate_scores = scores[candidates]
    order = np.lexsort((candidates, -candidate_scores))[:k]
    return RecommendationList(
        user=user,
        items=tuple(int(item) for item in candidates[order]),
        scores=tuple(float(score) for score in candidate_scores[order]),
    )


def recommend_with(scorer: Scorer, cold: RatingVector, k: int, user: int = -1) -> RecommendationList:
    return rank_items(scorer.score(cold), cold, k, user)


def recommend(
    generator: Generator,
    c_test: RatingVector,
    k: int,
    rating_scale: float = RATING_SCALE[1],
    user: int = -1,
) -> RecommendationList:
    """Rank every item not rated in ``c_test`` by the generated warm vector."""

    return recommend_with(GeneratorScorer(generator, rating_scale), c_test, k, user)
