"""Yardstick scorers evaluated through the same recommend/evaluate path."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from coldgan.data.log import InteractionLog
from coldgan.data.vectors import RatingVector
from coldgan.gan.model import ArchitectureConfig, GanModel, TrainConfig
from coldgan.utils.seeding import substream

from .recommend import GeneratorScorer


class PopularityScorer:
    """Scores every item by how many cohort users rated it."""

    name = "popularity"

    def __init__(self, counts: np.ndarray) -> None:
        self._counts = np.asarray(counts, dtype=np.float64)

    def score(self, cold: RatingVector) -> np.ndarray:
        return self._counts.copy()


class RandomScorer:
    """Uniform random scores from a seeded stream; consumed in call order."""

    name = "random"

    def __init__(self, seed: int) -> None:
        self._rng = substream(seed, "random-scorer")

    def score(self, cold: RatingVector) -> np.ndarray:
        return self._rng.random(cold.num_items)


def popularity_baseline(log: InteractionLog, users: Iterable[int] | None = None) -> PopularityScorer:
    """Popularity over ``users`` (the train cohort); items nobody rated score 0."""

    return PopularityScorer(np.asarray(log.item_rating_counts(users), dtype=np.float64))


def untrained_scorer(
    num_items: int,
    architecture: ArchitectureConfig,
    train_config: TrainConfig,
) -> GeneratorScorer:
    """A freshly initialised generator, drawn from the same ``init`` stream training uses."""

    model = GanModel.initialize(num_items, architecture, train_config, substream(train_config.seed, "init"))
    scorer = GeneratorScorer(model.generator, model.rating_scale)
    scorer.name = "untrained"
    return scorer
