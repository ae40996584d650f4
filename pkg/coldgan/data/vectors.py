"""Rating vectors, cold inputs and relevance targets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from coldgan.errors import DomainError, UnknownUserError

from .log import InteractionLog


@dataclass(frozen=True, eq=False)
class RatingVector:
    """Dense ratings over all N items (0 = unrated) plus the rated items by time."""

    values: np.ndarray
    rated_order: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.values.ndim != 1:
            raise DomainError("rating vector must be one-dimensional")
        if np.count_nonzero(self.values) != len(self.rated_order):
            raise DomainError(
                f"rated_order lists {len(self.rated_order)} items but {np.count_nonzero(self.values)} are rated"
            )

    @property
    def num_items(self) -> int:
        return int(self.values.shape[0])

    @property
    def count(self) -> int:
        return len(self.rated_order)

    def support(self) -> np.ndarray:
        """Rated item indices, ascending by index."""

        return np.flatnonzero(self.values)

    def restrict(self, kept: Sequence[int]) -> "RatingVector":
        """Keep only ``kept`` (a subsequence of ``rated_order``); zero the rest."""

        index = np.asarray(kept, dtype=np.intp)
        values = np.zeros_like(self.values)
        values[index] = self.values[index]
        return RatingVector(values=values, rated_order=tuple(int(item) for item in kept))

    def same_as(self, other: "RatingVector") -> bool:
        return self.rated_order == other.rated_order and np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class RelevanceVector:
    """Binary indicator over N items: rated and rated above the user's mean."""

    bits: np.ndarray

    def items(self) -> np.ndarray:
        return np.flatnonzero(self.bits)


def build_rating_vector(log: InteractionLog, user: int) -> RatingVector:
    """Dense rating vector of ``user``; ``rated_order`` sorted by (timestamp, item index)."""

    if not 0 <= user < log.num_users:
        raise UnknownUserError(f"unknown user index {user} (log has {log.num_users} users)")
    entries = sorted(log.user_entries[user], key=lambda entry: (entry[2], entry[0]))
    values = np.zeros(log.num_items, dtype=np.float64)
    for item, rating, _timestamp in entries:
        values[item] = rating
    return RatingVector(values=values, rated_order=tuple(item for item, _rating, _timestamp in entries))


def cold_input(w: RatingVector, keep: int = 10) -> RatingVector:
    """The ``keep`` earliest ratings of ``w``; everything later is discarded."""

    if keep < 1:
        raise DomainError(f"keep must be >= 1, got {keep}")
    if w.count <= keep:
        return w
    return w.restrict(w.rated_order[:keep])


def relevance_vector(w: RatingVector) -> RelevanceVector:
    """Mark items rated strictly above the mean of the user's nonzero ratings."""

    rated = w.values != 0
    if not rated.any():
        return RelevanceVector(bits=np.zeros(w.num_items, dtype=bool))
    mean = float(w.values[rated].mean())
    return RelevanceVector(bits=rated & (w.values > mean))


def held_out_relevant(warm: RatingVector, cold: RatingVector) -> frozenset[int]:
    """Relevant items of the full warm vector that are not already in ``cold``."""

    relevant = set(int(item) for item in relevance_vector(warm).items())
    return frozenset(relevant.difference(cold.rated_order))


def rating_vector_from_rows(
    rows: Sequence[Tuple[str, float, int]],
    item_vocab: Mapping[str, int],
) -> Tuple[RatingVector, List[str]]:
    """Rating vector of a user outside the log, plus the item ids the vocabulary lacks.

    A repeated item keeps its later rating, as in the log.
    """

    latest: Dict[int, Tuple[float, int]] = {}
    unknown: List[str] = []
    for item_id, rating, timestamp in rows:
        item = item_vocab.get(item_id)
        if item is None:
            unknown.append(item_id)
            continue
        previous = latest.get(item)
        if previous is None or timestamp >= previous[1]:
            latest[item] = (rating, timestamp)
    values = np.zeros(len(item_vocab), dtype=np.float64)
    for item, (rating, _timestamp) in latest.items():
        values[item] = rating
    order = sorted(latest, key=lambda item: (latest[item][1], item))
    return RatingVector(values=values, rated_order=tuple(order)), unknown
