"""Interaction records, the interaction log and sparsity filtering."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Tuple

from coldgan.errors import DomainError

logger = logging.getLogger(__name__)

RATING_SCALE: Tuple[float, float] = (1.0, 5.0)


@dataclass(frozen=True, slots=True)
class Interaction:
    """A single rating event."""

    user_id: str
    item_id: str
    rating: float
    timestamp: int


@dataclass(frozen=True)
class InteractionLog:
    """Deduplicated interactions plus contiguous user/item vocabularies.

    Vocabularies map opaque ids to indices ``0..M-1`` / ``0..N-1`` in order of
    first appearance. Use :meth:`from_interactions` rather than the raw
    constructor so both invariants hold.
    """

    interactions: Tuple[Interaction, ...] = ()
    user_vocab: Mapping[str, int] = field(default_factory=dict)
    item_vocab: Mapping[str, int] = field(default_factory=dict)

    @classmethod
    def from_interactions(cls, records: Iterable[Interaction]) -> "InteractionLog":
        # A repeated (user, item) keeps the later timestamp; equal timestamps keep
        # the record read last. The surviving record stays at the first position.
        latest: Dict[Tuple[str, str], Interaction] = {}
        for record in records:
            key = (record.user_id, record.item_id)
            previous = latest.get(key)
            if previous is None or record.timestamp >= previous.timestamp:
                latest[key] = record
        interactions = tuple(latest.values())

        user_vocab: Dict[str, int] = {}
        item_vocab: Dict[str, int] = {}
        for record in interactions:
            user_vocab.setdefault(record.user_id, len(user_vocab))
            item_vocab.setdefault(record.item_id, len(item_vocab))
        return cls(interactions=interactions, user_vocab=user_vocab, item_vocab=item_vocab)

    @property
    def num_users(self) -> int:
        return len(self.user_vocab)

    @property
    def num_items(self) -> int:
        return len(self.item_vocab)

    @property
    def num_ratings(self) -> int:
        return len(self.interactions)

    @cached_property
    def user_ids(self) -> Tuple[str, ...]:
        """Index -> user id."""

        return tuple(sorted(self.user_vocab, key=self.user_vocab.__getitem__))

    @cached_property
    def item_ids(self) -> Tuple[str, ...]:
        """Index -> item id."""

        return tuple(sorted(self.item_vocab, key=self.item_vocab.__getitem__))

    @cached_property
    def user_entries(self) -> Tuple[Tuple[Tuple[int, float, int], ...], ...]:
        """Per user index, the ``(item_index, rating, timestamp)`` triples in log order."""

        grouped: List[List[Tuple[int, float, int]]] = [[] for _ in range(self.num_users)]
        for record in self.interactions:
            grouped[self.user_vocab[record.user_id]].append(
                (self.item_vocab[record.item_id], record.rating, record.timestamp)
            )
        return tuple(tuple(entries) for entries in grouped)

    def item_rating_counts(self, users: Iterable[int] | None = None) -> List[int]:
        """Number of ratings per item index, optionally restricted to ``users``."""

        counts = [0] * self.num_items
        selected = range(self.num_users) if users is None else users
        for user in selected:
            for item, _rating, _timestamp in self.user_entries[user]:
                counts[item] += 1
        return counts


def filter_sparse(
    log: InteractionLog,
    min_user_interactions: int = 15,
    min_item_raters: int = 3,
) -> InteractionLog:
    """Drop sparse users, then sparse items counted on what is left.

    One pass each; the item pass can push a surviving user back below the user
    threshold and that is not revisited.
    """

    if min_user_interactions < 1 or min_item_raters < 1:
        raise DomainError(f"filter thresholds must be >= 1, got {min_user_interactions} and {min_item_raters}")

    user_counts = Counter(record.user_id for record in log.interactions)
    kept_users = [record for record in log.interactions if user_counts[record.user_id] >= min_user_interactions]
    item_counts = Counter(record.item_id for record in kept_users)
    kept = [record for record in kept_users if item_counts[record.item_id] >= min_item_raters]

    filtered = InteractionLog.from_interactions(kept)
    logger.info(
        "filter_sparse(%d, %d): users %d -> %d, items %d -> %d, ratings %d -> %d",
        min_user_interactions,
        min_item_raters,
        log.num_users,
        filtered.num_users,
        log.num_items,
        filtered.num_items,
        log.num_ratings,
        filtered.num_ratings,
    )
    return filtered
